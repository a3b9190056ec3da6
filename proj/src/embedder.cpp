#include "prospect/embedder.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "prospect/error.hpp"
#include "prospect/hashing.hpp"

namespace prospect {

EmbeddingMatrix::EmbeddingMatrix(std::size_t dim) : dim_(dim) {}

void EmbeddingMatrix::add_row(ExampleId id, std::span<const double> vector) {
    if (ids_.empty() && dim_ == 0) dim_ = vector.size();
    if (vector.size() != dim_ || dim_ == 0)
        throw InvariantError("embedding row for id " + std::to_string(id) + " has dimension " +
                             std::to_string(vector.size()) + ", expected " + std::to_string(dim_));
    for (double v : vector)
        if (!std::isfinite(v)) throw InvariantError("embedding row for id " + std::to_string(id) + " is not finite");
    ids_.push_back(id);
    data_.insert(data_.end(), vector.begin(), vector.end());
}

EmbeddingMatrix EmbeddingMatrix::select(std::span<const ExampleId> ids) const {
    std::unordered_map<ExampleId, std::size_t> where;
    where.reserve(ids_.size());
    for (std::size_t r = 0; r < ids_.size(); ++r) where.emplace(ids_[r], r);
    EmbeddingMatrix out(dim_);
    for (ExampleId id : ids) {
        const auto it = where.find(id);
        if (it == where.end()) throw InputError("no embedding for example id " + std::to_string(id));
        out.add_row(id, row(it->second));
    }
    return out;
}

void EmbeddingMatrix::normalize_rows() {
    for (std::size_t r = 0; r < rows(); ++r) {
        double* v = data_.data() + r * dim_;
        double norm2 = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) norm2 += v[i] * v[i];
        if (norm2 == 0.0) continue;
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t i = 0; i < dim_; ++i) v[i] *= inv;
    }
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}

EmbeddingMatrix Embedder::embed(std::span<const std::string> texts, std::span<const ExampleId> ids) const {
    if (texts.empty()) throw InputError("embed: no texts");
    if (!ids.empty() && ids.size() != texts.size()) throw InputError("embed: ids and texts differ in length");
    const auto vectors = embed_batch(texts);
    if (vectors.size() != texts.size())
        throw BackendError(fingerprint() + ": returned " + std::to_string(vectors.size()) + " vectors for " +
                               std::to_string(texts.size()) + " texts",
                           false);
    const std::size_t dim = vectors.front().size();
    EmbeddingMatrix m(dim);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].size() != dim || dim == 0)
            throw BackendError(fingerprint() + ": dimension mismatch within batch (" + std::to_string(vectors[i].size()) +
                                   " vs " + std::to_string(dim) + ")",
                               false);
        for (double v : vectors[i])
            if (!std::isfinite(v)) throw BackendError(fingerprint() + ": non-finite embedding entry", false);
        m.add_row(ids.empty() ? static_cast<ExampleId>(i) : ids[i], vectors[i]);
    }
    m.normalize_rows();
    return m;
}

// ---------------------------------------------------------------- hashing

HashingEmbedder::HashingEmbedder(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw ConfigError("hashing embedder: dim must be positive");
}

std::string HashingEmbedder::fingerprint() const { return "hashing-ngram23-v1:" + std::to_string(dim_); }

std::vector<double> HashingEmbedder::features(std::string_view text) const {
    std::vector<double> v(dim_, 0.0);
    for (std::size_t n = 2; n <= 3; ++n) {
        for (std::size_t i = 0; i + n <= text.size(); ++i) {
            const auto h = fnv1a64(text.substr(i, n));
            v[h % dim_] += (h >> 63) != 0 ? -1.0 : 1.0;
        }
    }
    return v;
}

std::vector<std::vector<double>> HashingEmbedder::embed_batch(std::span<const std::string> texts) const {
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        auto v = features(t);
        if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) v[0] = 1.0;
        out.push_back(std::move(v));
    }
    return out;
}

// ---------------------------------------------------------------- http

HttpEmbedder::HttpEmbedder(HttpEndpoint endpoint, EmbedProtocol protocol, std::string model, std::size_t batch_size)
    : endpoint_(std::move(endpoint)), protocol_(protocol), model_(std::move(model)), batch_size_(batch_size) {
    if (batch_size_ == 0) throw ConfigError("http embedder: batch size must be positive");
}

std::string HttpEmbedder::fingerprint() const {
    return std::string(protocol_ == EmbedProtocol::native ? "http-embed:" : "openai-embeddings:") + endpoint_.base_url +
           (model_.empty() ? "" : "#" + model_);
}

std::vector<std::vector<double>> HttpEmbedder::embed_batch(std::span<const std::string> texts) const {
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (std::size_t begin = 0; begin < texts.size(); begin += batch_size_) {
        const auto chunk = texts.subspan(begin, std::min(batch_size_, texts.size() - begin));
        const nlohmann::json batch(std::vector<std::string>(chunk.begin(), chunk.end()));
        try {
            if (protocol_ == EmbedProtocol::native) {
                const auto res = post_json(endpoint_, "/embed", {{"texts", batch}});
                for (const auto& v : res.at("vectors")) out.push_back(v.get<std::vector<double>>());
            } else {
                nlohmann::json body = {{"input", batch}};
                if (!model_.empty()) body["model"] = model_;
                const auto res = post_json(endpoint_, "/embeddings", body);
                const auto& data = res.at("data");
                std::vector<std::vector<double>> rows(data.size());
                for (const auto& item : data) {
                    const auto index = item.at("index").get<std::size_t>();
                    if (index >= rows.size()) throw BackendError(fingerprint() + ": embedding index out of range", false);
                    rows[index] = item.at("embedding").get<std::vector<double>>();
                }
                for (auto& r : rows) out.push_back(std::move(r));
            }
        } catch (const nlohmann::json::exception& e) {
            throw BackendError(fingerprint() + ": malformed embedding response: " + e.what(), false);
        }
    }
    return out;
}

}  // namespace prospect
