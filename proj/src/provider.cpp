#include "evpv/provider.hpp"

#include <fstream>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "evpv/rng.hpp"

namespace evpv {

// ---------------------------------------------------------------------------
// FileProvider
// ---------------------------------------------------------------------------

ConstraintSet FileProvider::fetch(const std::string& instance_id, const std::string&,
                                  const std::string&) {
    const auto path = dir_ / (instance_id + ".constraints.json");
    std::ifstream in(path);
    if (!in) throw ProviderError("no constraint file for instance '" + instance_id + "' at " +
                                 path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_constraints(buf.str(), instance_id, source_);
}

// ---------------------------------------------------------------------------
// MockProvider
// ---------------------------------------------------------------------------

ConstraintSet MockProvider::fetch(const std::string& instance_id, const std::string&,
                                  const std::string&) {
    Rng rng(mix_seed(seed_, hash_string(instance_id)));

    static const char* objects[] = {"cylinder", "cone", "prism", "sphere", "cube", "pyramid"};
    static const char* measures[] = {"height", "base radius", "width", "edge length"};

    const std::string a = objects[rng.bounded(6)];
    std::string b = objects[rng.bounded(6)];
    if (b == a) b = objects[(rng.bounded(5) + 1) % 6];

    ConstraintSet set;
    set.instance_id = instance_id;
    set.source = Source::Predicted;

    const std::size_t numerics = 1 + rng.bounded(3);
    for (std::size_t i = 0; i < numerics; ++i) {
        NumericFact f;
        f.entity = std::string(i % 2 == 0 ? a : b) + " " + measures[rng.bounded(4)];
        f.attribute = "length";
        f.value = static_cast<double>(1 + rng.bounded(12));
        f.unit = "cm";
        set.constraints.push_back({f, static_cast<double>(85 + rng.bounded(15)) / 100.0});
    }
    if (rng.coin(0.7)) {
        RelationFact f;
        f.type = all_relation_types()[rng.bounded(all_relation_types().size())];
        f.entities = {a + " axis", b + " axis"};
        set.constraints.push_back({f, static_cast<double>(85 + rng.bounded(15)) / 100.0});
    }
    if (rng.coin(0.7)) {
        StructureFact f;
        f.type = StructureType::Composite;
        f.parts = {a, b};
        set.constraints.push_back({f, static_cast<double>(85 + rng.bounded(15)) / 100.0});
    }
    return set;
}

// ---------------------------------------------------------------------------
// RemoteProvider
// ---------------------------------------------------------------------------

namespace {

struct ParsedUrl {
    std::string base;  // scheme://host[:port]
    std::string path;
};

ParsedUrl split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ProviderError("endpoint must be a full URL: " + url);
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

ConstraintSet RemoteProvider::fetch(const std::string& instance_id, const std::string& question,
                                    const std::string& image_ref) {
    const ParsedUrl url = split_url(cfg_.endpoint);

    nlohmann::ordered_json body;
    body["question"] = question;
    body["image_ref"] = image_ref;
    const std::string payload = body.dump();

    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
        httplib::Client client(url.base);
        client.set_connection_timeout(cfg_.timeout_seconds, 0);
        client.set_read_timeout(cfg_.timeout_seconds, 0);
        httplib::Headers headers;
        if (!cfg_.bearer_token.empty())
            headers.emplace("Authorization", "Bearer " + cfg_.bearer_token);

        auto res = client.Post(url.path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        try {
            return parse_constraints(res->body, instance_id, Source::Predicted);
        } catch (const std::exception& e) {
            last_error = std::string("bad response body: ") + e.what();
        }
    }
    throw ProviderError("remote evidence fetch failed for '" + instance_id + "': " + last_error);
}

// ---------------------------------------------------------------------------
// CachingProvider
// ---------------------------------------------------------------------------

ConstraintSet CachingProvider::fetch(const std::string& instance_id, const std::string& question,
                                     const std::string& image_ref) {
    std::shared_future<ConstraintSet> fut;
    bool owner = false;
    std::promise<ConstraintSet> prom;

    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = pending_.find(instance_id);
        if (it == pending_.end()) {
            fut = prom.get_future().share();
            pending_.emplace(instance_id, fut);
            owner = true;
        } else {
            fut = it->second;
        }
    }

    if (owner) {
        try {
            count_.fetch_add(1);
            prom.set_value(inner_.fetch(instance_id, question, image_ref));
        } catch (...) {
            prom.set_exception(std::current_exception());
        }
    }
    return fut.get();  // rethrows the owner's failure for every waiter
}

}  // namespace evpv
