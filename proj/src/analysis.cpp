#include "prospect/analysis.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "prospect/error.hpp"

namespace prospect {

OverlapReport overlap(const RankedSelection& a, const RankedSelection& b, std::string label_a, std::string label_b) {
    if (a.example_ids.size() != b.example_ids.size())
        throw InputError("cannot compare selections of different sizes (" + std::to_string(a.example_ids.size()) +
                         " vs " + std::to_string(b.example_ids.size()) + ")");
    OverlapReport r;
    r.label_a = std::move(label_a);
    r.label_b = std::move(label_b);
    r.set_size = a.example_ids.size();
    if (r.set_size == 0) {
        r.fraction = 1.0;
        return r;
    }
    const std::unordered_set<ExampleId> in_a(a.example_ids.begin(), a.example_ids.end());
    const std::unordered_set<ExampleId> in_b(b.example_ids.begin(), b.example_ids.end());
    std::size_t shared = 0;
    for (ExampleId id : in_a) shared += in_b.count(id);
    r.fraction = static_cast<double>(shared) / static_cast<double>(r.set_size);
    return r;
}

OverlapMatrix overlap_matrix(std::span<const LabeledSelection> selections) {
    OverlapMatrix m;
    const auto n = selections.size();
    m.values.assign(n, std::vector<double>(n, 1.0));
    for (const auto& s : selections) m.labels.push_back(s.label);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            m.values[i][j] = m.values[j][i] = overlap(selections[i].selection, selections[j].selection).fraction;
    return m;
}

namespace {

std::string fmt(double v) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(6) << v;
    return ss.str();
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::string overlap_matrix_csv(const OverlapMatrix& matrix) {
    std::ostringstream ss;
    ss << "label";
    for (const auto& l : matrix.labels) ss << ',' << csv_field(l);
    ss << '\n';
    for (std::size_t i = 0; i < matrix.labels.size(); ++i) {
        ss << csv_field(matrix.labels[i]);
        for (double v : matrix.values[i]) ss << ',' << fmt(v);
        ss << '\n';
    }
    return ss.str();
}

void emit_report(std::span<const ScoreReport> reports, std::span<const LabeledSelection> selections,
                 const OverlapMatrix& overlaps, const std::filesystem::path& out_dir) {
    if (reports.empty()) throw InputError("report: no score reports");
    const auto m = reports.front().task_count();
    for (const auto& r : reports)
        if (r.task_count() != m) throw InputError("report: score reports disagree on the task count");
    if (m < 1) throw InputError("report: score reports carry no per-task scores");

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create report directory '" + out_dir.string() + "': " + ec.message());

    std::vector<std::size_t> histogram(static_cast<std::size_t>(m) + 1, 0);
    for (const auto& r : reports) ++histogram[static_cast<std::size_t>(r.wins)];
    {
        std::ostringstream ss;
        ss << "wins,golden_score,count\n";
        for (std::size_t k = 0; k < histogram.size(); ++k)
            ss << k << ',' << fmt(static_cast<double>(k) / static_cast<double>(m)) << ',' << histogram[k] << '\n';
        write_file(out_dir / "gs_histogram.csv", ss.str());
    }

    std::unordered_map<ExampleId, double> gs;
    for (const auto& r : reports) gs.emplace(r.example_id, r.golden_score);
    std::ostringstream sel_csv;
    sel_csv << "label,direction,fraction,size,min_gs,max_gs,mean_gs\n";
    for (const auto& s : selections) {
        double lo = 1.0, hi = 0.0, sum = 0.0;
        for (ExampleId id : s.selection.example_ids) {
            const auto it = gs.find(id);
            if (it == gs.end()) throw InputError("report: selection '" + s.label + "' references unscored example " +
                                                 std::to_string(id));
            lo = std::min(lo, it->second);
            hi = std::max(hi, it->second);
            sum += it->second;
        }
        const auto n = s.selection.example_ids.size();
        sel_csv << csv_field(s.label) << ',' << to_string(s.selection.direction) << ',' << fmt(s.selection.fraction)
                << ',' << n << ',' << fmt(n ? lo : 0.0) << ',' << fmt(n ? hi : 0.0) << ','
                << fmt(n ? sum / static_cast<double>(n) : 0.0) << '\n';
    }
    write_file(out_dir / "selections.csv", sel_csv.str());

    const bool have_overlaps = !overlaps.labels.empty();
    if (have_overlaps) write_file(out_dir / "overlap_matrix.csv", overlap_matrix_csv(overlaps));

    double mean_gs = 0.0;
    for (const auto& r : reports) mean_gs += r.golden_score;
    mean_gs /= static_cast<double>(reports.size());
    std::ostringstream summary;
    summary << "examples scored: " << reports.size() << '\n'
            << "tasks per example (m): " << m << '\n'
            << "mean golden score: " << fmt(mean_gs) << '\n'
            << "examples with golden score 0: " << histogram.front() << '\n'
            << "examples with golden score 1: " << histogram.back() << '\n'
            << "selections: " << selections.size() << '\n';
    for (const auto& s : selections)
        summary << "  " << s.label << ": " << to_string(s.selection.direction) << ' ' << fmt(s.selection.fraction)
                << " -> " << s.selection.example_ids.size() << " examples\n";
    if (have_overlaps) {
        summary << "overlap matrix (" << overlaps.labels.size() << "x" << overlaps.labels.size()
                << "): see overlap_matrix.csv\n";
    } else {
        summary << "overlap matrix: not computed\n";
    }
    write_file(out_dir / "summary.txt", summary.str());
}

}  // namespace prospect
