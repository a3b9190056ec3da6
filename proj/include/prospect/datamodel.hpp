#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace prospect {

using ExampleId = std::int64_t;

/// One candidate instruction example (question IQ, answer IA).
struct InstructionExample {
    ExampleId id = 0;          // 0-based record position in the source file
    std::string instruction;
    std::optional<std::string> input;
    std::string output;

    bool operator==(const InstructionExample&) const = default;
};

/// The question part of an example: instruction, plus "\n" + input when input is non-empty.
std::string question_text(const InstructionExample& example);

/// Content hash over (instruction, input, output); independent of id.
std::string content_fingerprint(const InstructionExample& example);

/// How a task entered the predefined set.
enum class Provenance { elite, coreset, random };

std::string_view to_string(Provenance p);
Provenance parse_provenance(std::string_view text);

/// One evaluation task {T, A}.
struct PredefinedTask {
    std::int64_t task_id = 0;
    std::string task_text;
    std::string answer_text;
    std::int64_t answer_token_count = 0;     // L, set by the scorer; 0 = not scored yet
    std::optional<double> zero_shot_score;   // set by the prospector
    Provenance provenance = Provenance::random;
    ExampleId source_example_id = 0;
};

/// Per-candidate scoring result.
struct ScoreReport {
    ExampleId example_id = 0;
    std::vector<double> one_shot_scores;
    double golden_score = 0.0;
    std::int64_t wins = 0;

    std::int64_t task_count() const { return static_cast<std::int64_t>(one_shot_scores.size()); }
    bool operator==(const ScoreReport&) const = default;
};

enum class Direction { top, bottom };

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view text);

struct RankedSelection {
    double fraction = 1.0;
    Direction direction = Direction::top;
    std::vector<ExampleId> example_ids;
};

enum class DatasetFormat { alpaca_json, jsonl };

std::string_view to_string(DatasetFormat f);
DatasetFormat parse_dataset_format(std::string_view text);

/// Picks jsonl for *.jsonl / *.ndjson, alpaca_json otherwise.
DatasetFormat guess_dataset_format(const std::filesystem::path& path);

struct LoadReport {
    std::size_t records_read = 0;
    std::size_t dropped_empty_output = 0;
};

struct LoadedDataset {
    std::vector<InstructionExample> examples;
    LoadReport report;
};

/// Parses an Alpaca JSON array or JSON-lines file. Records whose output is
/// empty (or whitespace only) are dropped and counted in the report.
/// Throws ParseError (with record/line index), EmptyDatasetError or IoError.
LoadedDataset load_dataset(const std::filesystem::path& path, DatasetFormat format);

/// Parses from memory; `source` only labels error messages.
LoadedDataset parse_dataset(std::string_view text, DatasetFormat format, std::string_view source = "<memory>");

/// Writes examples in the given format. The `input` key is emitted only when present.
void save_dataset(const std::filesystem::path& path, const std::vector<InstructionExample>& examples,
                  DatasetFormat format);
std::string serialize_dataset(const std::vector<InstructionExample>& examples, DatasetFormat format);

/// Reads a whole file; throws IoError.
std::string read_file(const std::filesystem::path& path);
/// Writes a whole file (creating parent directories); throws IoError.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace prospect
