#include "prospect/datamodel.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "prospect/error.hpp"
#include "prospect/hashing.hpp"

namespace prospect {

using nlohmann::json;

std::string question_text(const InstructionExample& example) {
    if (example.input && !example.input->empty()) return example.instruction + "\n" + *example.input;
    return example.instruction;
}

std::string content_fingerprint(const InstructionExample& example) {
    Fingerprinter fp;
    fp.add(std::string_view{"example"}).add(example.instruction);
    fp.add(static_cast<std::int64_t>(example.input.has_value()));
    fp.add(example.input.value_or("")).add(example.output);
    return fp.finish();
}

std::string_view to_string(Direction d) { return d == Direction::top ? "top" : "bottom"; }

Direction parse_direction(std::string_view text) {
    if (text == "top") return Direction::top;
    if (text == "bottom") return Direction::bottom;
    throw ConfigError("unknown direction '" + std::string(text) + "' (expected top|bottom)");
}

std::string_view to_string(Provenance p) {
    switch (p) {
        case Provenance::elite: return "elite";
        case Provenance::coreset: return "coreset";
        case Provenance::random: return "random";
    }
    return "random";
}

Provenance parse_provenance(std::string_view text) {
    if (text == "elite") return Provenance::elite;
    if (text == "coreset") return Provenance::coreset;
    if (text == "random") return Provenance::random;
    throw ParseError("unknown provenance '" + std::string(text) + "'");
}

std::string_view to_string(DatasetFormat f) { return f == DatasetFormat::jsonl ? "jsonl" : "alpaca_json"; }

DatasetFormat parse_dataset_format(std::string_view text) {
    if (text == "jsonl") return DatasetFormat::jsonl;
    if (text == "alpaca_json" || text == "json") return DatasetFormat::alpaca_json;
    throw ConfigError("unknown dataset format '" + std::string(text) + "' (expected alpaca_json|jsonl)");
}

DatasetFormat guess_dataset_format(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    return (ext == ".jsonl" || ext == ".ndjson") ? DatasetFormat::jsonl : DatasetFormat::alpaca_json;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

namespace {

bool is_blank(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

std::string required_string(const json& record, const char* key, const std::string& where) {
    const auto it = record.find(key);
    if (it == record.end()) throw ParseError(where + ": missing field '" + key + "'");
    if (!it->is_string()) throw ParseError(where + ": field '" + key + "' is not a string");
    return it->get<std::string>();
}

/// Appends the record to `out` unless its output is empty. Returns false when dropped.
bool ingest(const json& record, ExampleId id, const std::string& where, std::vector<InstructionExample>& out) {
    if (!record.is_object()) throw ParseError(where + ": record is not an object");
    InstructionExample ex;
    ex.id = id;
    ex.instruction = required_string(record, "instruction", where);
    ex.output = required_string(record, "output", where);
    if (const auto it = record.find("input"); it != record.end() && !it->is_null()) {
        if (!it->is_string()) throw ParseError(where + ": field 'input' is not a string");
        ex.input = it->get<std::string>();
    }
    if (is_blank(ex.output)) return false;
    out.push_back(std::move(ex));
    return true;
}

json to_json(const InstructionExample& ex) {
    json j = json::object();
    j["instruction"] = ex.instruction;
    if (ex.input) j["input"] = *ex.input;
    j["output"] = ex.output;
    return j;
}

}  // namespace

LoadedDataset parse_dataset(std::string_view text, DatasetFormat format, std::string_view source) {
    LoadedDataset result;
    const std::string src(source);

    if (format == DatasetFormat::alpaca_json) {
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ParseError(src + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
        }
        if (!doc.is_array()) throw ParseError(src + ": expected a JSON array of records");
        for (std::size_t i = 0; i < doc.size(); ++i) {
            ++result.report.records_read;
            const auto where = src + ": record " + std::to_string(i);
            if (!ingest(doc[i], static_cast<ExampleId>(i), where, result.examples))
                ++result.report.dropped_empty_output;
        }
    } else {
        std::size_t line_no = 0;
        ExampleId record_index = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto nl = text.find('\n', pos);
            const auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
            ++line_no;
            if (is_blank(line)) continue;
            const auto where = src + ": line " + std::to_string(line_no);
            json record;
            try {
                record = json::parse(line);
            } catch (const json::parse_error& e) {
                throw ParseError(where + ": malformed JSON: " + e.what());
            }
            ++result.report.records_read;
            if (!ingest(record, record_index++, where, result.examples)) ++result.report.dropped_empty_output;
        }
    }

    if (result.examples.empty())
        throw EmptyDatasetError(src + ": no usable records (" + std::to_string(result.report.records_read) +
                                " read, " + std::to_string(result.report.dropped_empty_output) +
                                " dropped for empty output)");
    return result;
}

LoadedDataset load_dataset(const std::filesystem::path& path, DatasetFormat format) {
    return parse_dataset(read_file(path), format, path.string());
}

std::string serialize_dataset(const std::vector<InstructionExample>& examples, DatasetFormat format) {
    if (format == DatasetFormat::jsonl) {
        std::string out;
        for (const auto& ex : examples) {
            out += to_json(ex).dump();
            out += '\n';
        }
        return out;
    }
    json arr = json::array();
    for (const auto& ex : examples) arr.push_back(to_json(ex));
    return arr.dump(2) + "\n";
}

void save_dataset(const std::filesystem::path& path, const std::vector<InstructionExample>& examples,
                  DatasetFormat format) {
    write_file(path, serialize_dataset(examples, format));
}

}  // namespace prospect
