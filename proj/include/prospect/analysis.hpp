#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "prospect/datamodel.hpp"

namespace prospect {

struct OverlapReport {
    std::string label_a;
    std::string label_b;
    double fraction = 0.0;  // |A ∩ B| / |A|
    std::size_t set_size = 0;
};

/// Share of ids common to two equally sized selections, ignoring order.
/// Throws InputError when the sizes differ.
OverlapReport overlap(const RankedSelection& a, const RankedSelection& b, std::string label_a = "a",
                      std::string label_b = "b");

struct LabeledSelection {
    std::string label;
    RankedSelection selection;
};

struct OverlapMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> values;  // values[i][j] = overlap(i, j)
};

OverlapMatrix overlap_matrix(std::span<const LabeledSelection> selections);

/// overlap_matrix.csv: header "label,<label_1>,...,<label_n>", then one row per label.
std::string overlap_matrix_csv(const OverlapMatrix& matrix);

/// Writes into `out_dir`:
///   gs_histogram.csv   wins,golden_score,count        one row per grid point k/m, k = 0..m
///   selections.csv     label,direction,fraction,size,min_gs,max_gs,mean_gs
///   overlap_matrix.csv only when `overlaps` has entries
///   summary.txt        human-readable digest
/// Throws InputError when reports disagree on m, IoError when out_dir is unwritable.
void emit_report(std::span<const ScoreReport> reports, std::span<const LabeledSelection> selections,
                 const OverlapMatrix& overlaps, const std::filesystem::path& out_dir);

}  // namespace prospect
