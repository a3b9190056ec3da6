#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "prospect/datamodel.hpp"
#include "prospect/http_client.hpp"

namespace prospect {

/// Row-per-example dense vectors, stored row-major.
class EmbeddingMatrix {
public:
    EmbeddingMatrix() = default;
    explicit EmbeddingMatrix(std::size_t dim);

    std::size_t dim() const { return dim_; }
    std::size_t rows() const { return ids_.size(); }
    bool empty() const { return ids_.empty(); }

    /// Throws InvariantError on a dimension mismatch or a non-finite entry.
    void add_row(ExampleId id, std::span<const double> vector);

    ExampleId id(std::size_t row) const { return ids_[row]; }
    const std::vector<ExampleId>& ids() const { return ids_; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * dim_, dim_}; }

    /// Rows whose ids appear in `ids`, in that order. Throws InputError for an unknown id.
    EmbeddingMatrix select(std::span<const ExampleId> ids) const;

    /// Scales every non-zero row to unit L2 norm.
    void normalize_rows();

private:
    std::size_t dim_ = 0;
    std::vector<ExampleId> ids_;
    std::vector<double> data_;
};

double squared_distance(std::span<const double> a, std::span<const double> b);

/// Text -> vector backend. `embed` validates and L2-normalizes whatever
/// `embed_batch` returns.
class Embedder {
public:
    virtual ~Embedder() = default;

    /// One row per text, in input order. Row ids are `ids[i]` when given,
    /// otherwise i. Throws InputError on empty input, BackendError when the
    /// backend returns rows of differing dimension or the wrong row count.
    EmbeddingMatrix embed(std::span<const std::string> texts, std::span<const ExampleId> ids = {}) const;

    virtual std::string fingerprint() const = 0;

protected:
    virtual std::vector<std::vector<double>> embed_batch(std::span<const std::string> texts) const = 0;
};

/// Signed feature hashing of byte 2-grams and 3-grams.
///
/// For every n-gram g (n = 2, 3) of the text's bytes, h = FNV-1a-64(g);
/// component (h mod dim) gains -1 when the top bit of h is set, +1
/// otherwise. The result is L2-normalized. A text with no n-grams, or whose
/// features cancel exactly, maps to the unit vector e_0.
class HashingEmbedder final : public Embedder {
public:
    explicit HashingEmbedder(std::size_t dim = 256);
    std::string fingerprint() const override;

    /// Raw (unnormalized) feature vector.
    std::vector<double> features(std::string_view text) const;

protected:
    std::vector<std::vector<double>> embed_batch(std::span<const std::string> texts) const override;

private:
    std::size_t dim_;
};

enum class EmbedProtocol {
    /// POST {base}/embed {"texts": [str...]} -> {"vectors": [[float...]...]}
    native,
    /// POST {base}/embeddings {"input": [str...], "model": str} -> {"data": [{"index", "embedding"}...]}
    openai_embeddings,
};

class HttpEmbedder final : public Embedder {
public:
    HttpEmbedder(HttpEndpoint endpoint, EmbedProtocol protocol, std::string model = {}, std::size_t batch_size = 64);
    std::string fingerprint() const override;

protected:
    std::vector<std::vector<double>> embed_batch(std::span<const std::string> texts) const override;

private:
    HttpEndpoint endpoint_;
    EmbedProtocol protocol_;
    std::string model_;
    std::size_t batch_size_;
};

}  // namespace prospect
