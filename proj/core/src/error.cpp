#include "zeus/error.hpp"

namespace zeus {

namespace {

std::string describe(const std::string& question_id, const std::vector<std::string>& missing,
                     const std::string& cause) {
    std::string msg = "pool for question '" + question_id + "' is incomplete; missing " +
                      std::to_string(missing.size()) + " slot(s):";
    for (const auto& slot : missing) {
        msg += " " + slot;
    }
    if (!cause.empty()) {
        msg += " (first failure: " + cause + ")";
    }
    return msg;
}

}  // namespace

PoolIncompleteError::PoolIncompleteError(const std::string& question_id,
                                         std::vector<std::string> missing_slots,
                                         std::string first_cause)
    : Error(describe(question_id, missing_slots, first_cause)),
      missing_(std::move(missing_slots)),
      cause_(std::move(first_cause)) {}

}  // namespace zeus
