#include "prospect/scorer.hpp"

#include <cmath>
#include <numeric>
#include <unordered_map>

#include "prospect/error.hpp"
#include "prospect/hashing.hpp"

namespace prospect {

double mean_logprob(const ConditionalScoreResult& result) {
    if (result.token_count < 1 || result.token_logprobs.empty())
        throw InvariantError("mean_logprob: result has no tokens");
    const double sum = std::accumulate(result.token_logprobs.begin(), result.token_logprobs.end(), 0.0);
    return sum / static_cast<double>(result.token_logprobs.size());
}

void check_result(const ConditionalScoreResult& result, const std::string& backend) {
    if (result.token_count != static_cast<std::int64_t>(result.token_logprobs.size()))
        throw BackendError(backend + ": token_count " + std::to_string(result.token_count) +
                               " does not match " + std::to_string(result.token_logprobs.size()) + " log-probs",
                           false);
    if (result.token_count < 1) throw BackendError(backend + ": no continuation tokens returned", false);
    for (double lp : result.token_logprobs) {
        if (!std::isfinite(lp) || lp > 0.0)
            throw BackendError(backend + ": log-prob " + std::to_string(lp) + " is not finite and <= 0", false);
    }
}

namespace {

void require_continuation(const ConditionalScoreRequest& request) {
    if (request.continuation.empty()) throw EmptyContinuationError("continuation has no tokens");
}

}  // namespace

// ---------------------------------------------------------------- uniform

UniformScorer::UniformScorer(int alphabet_size) : alphabet_size_(alphabet_size) {
    if (alphabet_size < 1) throw ConfigError("uniform scorer: alphabet size must be >= 1");
}

ConditionalScoreResult UniformScorer::score_continuation(const ConditionalScoreRequest& request) const {
    require_continuation(request);
    ConditionalScoreResult r;
    r.token_logprobs.assign(request.continuation.size(), -std::log(static_cast<double>(alphabet_size_)));
    r.token_count = static_cast<std::int64_t>(r.token_logprobs.size());
    return r;
}

std::string UniformScorer::fingerprint() const { return "uniform-v1:" + std::to_string(alphabet_size_); }

// ---------------------------------------------------------------- bigram

BigramScorer::BigramScorer(std::string_view corpus, bool adapt_to_context)
    : counts_(static_cast<std::size_t>(kVocab + 1) * kVocab, 0), adapt_(adapt_to_context) {
    int prev = kBegin;
    for (unsigned char c : corpus) {
        ++counts_[index(prev, c)];
        ++row_totals_[static_cast<std::size_t>(prev)];
        prev = c;
    }
    Fingerprinter fp;
    fp.add(std::string_view{"bigram-v1"}).add(corpus).add(static_cast<std::int64_t>(adapt_));
    fingerprint_ = std::string(adapt_ ? "bigram-adaptive-v1:" : "bigram-v1:") + fp.finish().substr(0, 16);
}

ConditionalScoreResult BigramScorer::score_continuation(const ConditionalScoreRequest& request) const {
    require_continuation(request);

    // Prefix-local counts; sparse since prefixes are short relative to the table.
    std::unordered_map<std::size_t, std::int64_t> local;
    std::array<std::int64_t, kVocab + 1> local_rows{};

    int prev = kBegin;
    const auto observe = [&](unsigned char c) {
        if (adapt_) {
            ++local[index(prev, c)];
            ++local_rows[static_cast<std::size_t>(prev)];
        }
        prev = c;
    };
    for (unsigned char c : request.context) observe(c);

    ConditionalScoreResult r;
    r.token_logprobs.reserve(request.continuation.size());
    for (unsigned char c : request.continuation) {
        const auto i = index(prev, c);
        const auto row = static_cast<std::size_t>(prev);
        const auto seen = adapt_ ? local.find(i) : local.end();
        const std::int64_t local_pair = seen == local.end() ? 0 : seen->second;
        const double num = static_cast<double>(counts_[i] + local_pair + 1);
        const double den = static_cast<double>(row_totals_[row] + (adapt_ ? local_rows[row] : 0) + kVocab);
        r.token_logprobs.push_back(std::log(num / den));
        observe(c);
    }
    r.token_count = static_cast<std::int64_t>(r.token_logprobs.size());
    return r;
}

std::string BigramScorer::fingerprint() const { return fingerprint_; }

// ---------------------------------------------------------------- http

HttpScorer::HttpScorer(HttpEndpoint endpoint, ScoreProtocol protocol, std::string model)
    : endpoint_(std::move(endpoint)), protocol_(protocol), model_(std::move(model)) {}

std::string HttpScorer::fingerprint() const {
    return std::string(protocol_ == ScoreProtocol::native ? "http-native:" : "openai-completions:") +
           endpoint_.base_url + (model_.empty() ? "" : "#" + model_);
}

ConditionalScoreResult HttpScorer::score_continuation(const ConditionalScoreRequest& request) const {
    require_continuation(request);
    ConditionalScoreResult r;
    if (protocol_ == ScoreProtocol::native) {
        const nlohmann::json body = {{"context", request.context}, {"continuation", request.continuation}};
        r = parse_native(post_json(endpoint_, "/score", body));
    } else {
        nlohmann::json body = {{"prompt", request.context + request.continuation},
                               {"max_tokens", 0},
                               {"echo", true},
                               {"logprobs", 0},
                               {"temperature", 0}};
        if (!model_.empty()) body["model"] = model_;
        r = parse_openai(post_json(endpoint_, "/completions", body), request.context.size());
    }
    if (r.token_count == 0) throw EmptyContinuationError(fingerprint() + ": continuation tokenized to zero tokens");
    check_result(r, fingerprint());
    return r;
}

ConditionalScoreResult HttpScorer::parse_native(const nlohmann::json& response) const {
    try {
        ConditionalScoreResult r;
        r.token_logprobs = response.at("token_logprobs").get<std::vector<double>>();
        r.token_count = response.at("token_count").get<std::int64_t>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(fingerprint() + ": malformed score response: " + e.what(), false);
    }
}

ConditionalScoreResult HttpScorer::parse_openai(const nlohmann::json& response, std::size_t context_bytes) const {
    try {
        const auto& lp = response.at("choices").at(0).at("logprobs");
        const auto& offsets = lp.at("text_offset");
        const auto& values = lp.at("token_logprobs");
        if (offsets.size() != values.size())
            throw BackendError(fingerprint() + ": text_offset/token_logprobs length mismatch", false);
        ConditionalScoreResult r;
        for (std::size_t i = 0; i < offsets.size(); ++i) {
            if (offsets[i].get<std::size_t>() < context_bytes) continue;
            if (values[i].is_null())
                throw BackendError(fingerprint() + ": missing log-prob for continuation token " + std::to_string(i),
                                   false);
            r.token_logprobs.push_back(values[i].get<double>());
        }
        r.token_count = static_cast<std::int64_t>(r.token_logprobs.size());
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(fingerprint() + ": malformed completions response: " + e.what(), false);
    }
}

}  // namespace prospect
