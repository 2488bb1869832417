#pragma once

#include <atomic>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

#include "evpv/constraints.hpp"

namespace evpv {

// ---------------------------------------------------------------------------
// Sources of structured visual evidence.  Implementations may be called from
// several workers at once; each must be internally thread-safe.
// ---------------------------------------------------------------------------

struct ProviderError : std::runtime_error {
    explicit ProviderError(const std::string& msg) : std::runtime_error(msg) {}
};

class EvidenceProvider {
public:
    virtual ~EvidenceProvider() = default;
    virtual ConstraintSet fetch(const std::string& instance_id, const std::string& question,
                                const std::string& image_ref) = 0;
};

// Reads {instance_id}.constraints.json from a directory.
class FileProvider : public EvidenceProvider {
public:
    explicit FileProvider(std::filesystem::path dir, Source source = Source::Predicted)
        : dir_(std::move(dir)), source_(source) {}
    ConstraintSet fetch(const std::string& instance_id, const std::string& question,
                        const std::string& image_ref) override;

private:
    std::filesystem::path dir_;
    Source source_;
};

// Deterministic synthetic evidence derived from (seed, instance_id).
// Useful for smoke tests and for exercising the pipeline without data.
class MockProvider : public EvidenceProvider {
public:
    explicit MockProvider(std::uint64_t seed) : seed_(seed) {}
    ConstraintSet fetch(const std::string& instance_id, const std::string& question,
                        const std::string& image_ref) override;

private:
    std::uint64_t seed_;
};

// POSTs {"question", "image_ref"} to an HTTP endpoint that answers with a
// JSON constraint array.
class RemoteProvider : public EvidenceProvider {
public:
    struct Config {
        std::string endpoint;      // e.g. http://127.0.0.1:8080/extract
        std::string bearer_token;  // optional
        int timeout_seconds = 10;
        int retries = 2;           // additional attempts after the first
    };
    explicit RemoteProvider(Config cfg) : cfg_(std::move(cfg)) {}
    ConstraintSet fetch(const std::string& instance_id, const std::string& question,
                        const std::string& image_ref) override;

private:
    Config cfg_;
};

// Fetch-once wrapper: any number of concurrent callers, exactly one
// underlying fetch per instance id (failures included).
class CachingProvider : public EvidenceProvider {
public:
    explicit CachingProvider(EvidenceProvider& inner) : inner_(inner) {}
    ConstraintSet fetch(const std::string& instance_id, const std::string& question,
                        const std::string& image_ref) override;

    std::size_t underlying_fetches() const { return count_.load(); }

private:
    EvidenceProvider& inner_;
    std::mutex mu_;
    std::map<std::string, std::shared_future<ConstraintSet>> pending_;
    std::atomic<std::size_t> count_{0};
};

}  // namespace evpv
