#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "prospect/http_client.hpp"

namespace prospect {

/// Score `continuation` token by token, teacher-forced after `context`.
struct ConditionalScoreRequest {
    std::string context;
    std::string continuation;
};

struct ConditionalScoreResult {
    std::vector<double> token_logprobs;  // natural log, each finite and <= 0
    std::int64_t token_count = 0;        // == token_logprobs.size()
};

/// Arithmetic mean of the per-token log-probabilities. Requires token_count >= 1.
double mean_logprob(const ConditionalScoreResult& result);

/// Throws BackendError (non-retryable) unless `result` satisfies the result invariants.
void check_result(const ConditionalScoreResult& result, const std::string& backend);

/// Source of log p(continuation token | prefix). Implementations must be
/// safe to call concurrently.
class Scorer {
public:
    virtual ~Scorer() = default;

    /// Throws EmptyContinuationError when the continuation has no tokens,
    /// BackendError on backend failure.
    virtual ConditionalScoreResult score_continuation(const ConditionalScoreRequest& request) const = 0;

    /// Identity of the model behind the scorer; part of every cache key.
    virtual std::string fingerprint() const = 0;
};

/// Every byte has probability 1/alphabet_size regardless of context.
class UniformScorer final : public Scorer {
public:
    explicit UniformScorer(int alphabet_size);
    ConditionalScoreResult score_continuation(const ConditionalScoreRequest& request) const override;
    std::string fingerprint() const override;

private:
    int alphabet_size_;
};

/// Byte-level bigram model with add-one smoothing over 256 byte values.
///
///   p(b | a) = (c(a, b) + 1) / (c(a, .) + 256)
///
/// `a` is the previous byte, or a begin-of-sequence state for the first byte
/// of the (context + continuation) string. Counts come from the training
/// corpus (which itself starts in the begin state). With `adapt_to_context`
/// the bigrams already seen in the scored prefix are added to the corpus
/// counts, so a demonstration in the context can shift the answer's
/// likelihood; without it, only the last context byte matters.
class BigramScorer final : public Scorer {
public:
    static constexpr int kVocab = 256;
    static constexpr int kBegin = 256;

    explicit BigramScorer(std::string_view corpus, bool adapt_to_context = true);

    ConditionalScoreResult score_continuation(const ConditionalScoreRequest& request) const override;
    std::string fingerprint() const override;

    std::int64_t pair_count(int prev, unsigned char next) const { return counts_[index(prev, next)]; }
    std::int64_t row_count(int prev) const { return row_totals_[static_cast<std::size_t>(prev)]; }

private:
    static std::size_t index(int prev, unsigned char next) {
        return static_cast<std::size_t>(prev) * kVocab + next;
    }

    std::vector<std::int64_t> counts_;          // (kVocab + 1) x kVocab
    std::array<std::int64_t, kVocab + 1> row_totals_{};
    bool adapt_;
    std::string fingerprint_;
};

/// Protocol spoken to an HTTP scoring service.
enum class ScoreProtocol {
    /// POST {base}/score  {"context": str, "continuation": str}
    ///   -> {"token_logprobs": [float...], "token_count": int}
    native,
    /// POST {base}/completions with echo=true, max_tokens=0, logprobs=0 on
    /// prompt = context + continuation; tokens whose text_offset falls at or
    /// after the end of the context are the continuation tokens.
    openai_completions,
};

class HttpScorer final : public Scorer {
public:
    HttpScorer(HttpEndpoint endpoint, ScoreProtocol protocol, std::string model = {});
    ConditionalScoreResult score_continuation(const ConditionalScoreRequest& request) const override;
    std::string fingerprint() const override;

private:
    ConditionalScoreResult parse_native(const nlohmann::json& response) const;
    ConditionalScoreResult parse_openai(const nlohmann::json& response, std::size_t context_bytes) const;

    HttpEndpoint endpoint_;
    ScoreProtocol protocol_;
    std::string model_;
};

/// Forwards to another scorer and counts calls.
class CountingScorer final : public Scorer {
public:
    explicit CountingScorer(const Scorer& inner) : inner_(inner) {}
    ConditionalScoreResult score_continuation(const ConditionalScoreRequest& request) const override {
        calls_.fetch_add(1, std::memory_order_relaxed);
        return inner_.score_continuation(request);
    }
    std::string fingerprint() const override { return inner_.fingerprint(); }
    std::int64_t calls() const { return calls_.load(); }

private:
    const Scorer& inner_;
    mutable std::atomic<std::int64_t> calls_{0};
};

}  // namespace prospect
