#pragma once

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "zeus/uncertainty.hpp"

namespace zeus {

// Declaration order is the tie-break order used when ranking strategies.
enum class Strategy { Trivial, VeryEasy, Easy, Moderate, Challenging, Hard, VeryHard, All };

inline constexpr std::array<Strategy, 7> kBandStrategies = {
    Strategy::Trivial, Strategy::VeryEasy, Strategy::Easy,    Strategy::Moderate,
    Strategy::Challenging, Strategy::Hard, Strategy::VeryHard,
};

inline constexpr std::array<Strategy, 8> kAllStrategies = {
    Strategy::Trivial,     Strategy::VeryEasy, Strategy::Easy,     Strategy::Moderate,
    Strategy::Challenging, Strategy::Hard,     Strategy::VeryHard, Strategy::All,
};

std::string strategy_name(Strategy s);

// Case-insensitive; spaces, dashes and underscores are ignored
// ("very_easy", "Very Easy" and "VeryEasy" all parse).
Strategy parse_strategy(std::string_view name);

// Resolved band [u_min, u_max); u_max may be +infinity.
struct StrategySpec {
    Strategy strategy = Strategy::All;
    double u_min = 0.0;
    double u_max = 0.0;

    bool empty() const noexcept { return !(u_min < u_max); }
    bool contains(double u) const noexcept { return u_min <= u && u < u_max; }
    bool operator==(const StrategySpec&) const = default;
};

//   Trivial [0, mu-sd)     VeryEasy [0, mu)         Easy [0, mu+sd)
//   Moderate [mu-sd, mu)   Challenging [mu-sd, mu+sd)
//   Hard [mu-sd, inf)      VeryHard [mu, inf)       All [0, inf)
// Bounds below zero are clamped to zero.
StrategySpec resolve_strategy(Strategy s, double mean, double stddev);
StrategySpec resolve_strategy(Strategy s, const DatasetStats& stats);

// Ids of the estimates inside the band, in input order.
std::vector<std::string> filter_questions(std::span<const UncertaintyEstimate> estimates, const StrategySpec& spec);

struct Selection {
    StrategySpec spec;
    std::vector<std::string> selected_ids;
    std::size_t total_count = 0;

    bool operator==(const Selection&) const = default;
};

// selection_<S>.json: {strategy, u_min, u_max (null for +inf), selected_ids,
// selected_count, total_count}
std::string selection_to_json(const Selection& sel);
Selection selection_from_json(const std::string& text);
void save_selection(const std::filesystem::path& path, const Selection& sel);
Selection load_selection(const std::filesystem::path& path);

}  // namespace zeus
