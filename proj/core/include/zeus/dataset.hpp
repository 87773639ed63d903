#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "zeus/types.hpp"

namespace zeus {

struct DatasetSplit {
    std::vector<Question> unlabeled;
    std::vector<Question> test;
};

// Stratified, seeded split into an unlabeled pool and a test set. Strata come
// from Question::stratum when present, else from gold answers when every
// question has one, else the split is uniform. Each stratum contributes
// floor or ceil of its exact share; both sets keep input order.
DatasetSplit split_dataset(const std::vector<Question>& questions, double unlabeled_fraction, std::uint64_t seed);

// Reads the JSON-lines question format: {id, question, gold_answer?, choices?, stratum?}.
std::vector<Question> load_questions(const std::filesystem::path& path);
void save_questions(const std::filesystem::path& path, const std::vector<Question>& questions);

// Checks dataset invariants for `kind` and normalizes gold answers in place.
void prepare_questions(std::vector<Question>& questions, const TaskKind& kind);

}  // namespace zeus
