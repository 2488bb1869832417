#include "evpv/corruption.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "evpv/rng.hpp"
#include "evpv/tokens.hpp"

namespace evpv {

std::string_view to_string(CorruptionMode m) {
    switch (m) {
        case CorruptionMode::FlipFields: return "flip_fields";
        case CorruptionMode::ShuffleFacts: return "shuffle_facts";
        case CorruptionMode::DropFacts: return "drop_facts";
        case CorruptionMode::CaptionOnly: return "caption_only";
        case CorruptionMode::EmptyFacts: return "empty_facts";
    }
    return "?";
}

std::optional<CorruptionMode> corruption_mode_from_string(std::string_view s) {
    if (s == "flip_fields") return CorruptionMode::FlipFields;
    if (s == "shuffle_facts") return CorruptionMode::ShuffleFacts;
    if (s == "drop_facts") return CorruptionMode::DropFacts;
    if (s == "caption_only") return CorruptionMode::CaptionOnly;
    if (s == "empty_facts") return CorruptionMode::EmptyFacts;
    return std::nullopt;
}

namespace {

// A mutable field is addressed by (constraint, slot).  Slot layout:
// numeric: 0 = value, 1 = entity; relation: 0 = type, 1.. = entity labels;
// structure: 0.. = part labels.
struct FieldRef {
    std::size_t constraint;
    std::size_t slot;
};

std::vector<FieldRef> enumerate_fields(const ConstraintSet& set) {
    std::vector<FieldRef> out;
    for (std::size_t i = 0; i < set.constraints.size(); ++i) {
        const auto& c = set.constraints[i];
        if (c.numeric()) {
            out.push_back({i, 0});
            out.push_back({i, 1});
        } else if (const auto* r = c.relation()) {
            for (std::size_t s = 0; s <= r->entities.size(); ++s) out.push_back({i, s});
        } else if (const auto* st = c.structure()) {
            for (std::size_t s = 0; s < st->parts.size(); ++s) out.push_back({i, s});
        }
        // captions carry no mutable fields
    }
    return out;
}

std::size_t count_to_touch(double ratio, std::size_t total) {
    if (total == 0 || ratio <= 0.0) return 0;
    const auto n = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(total)));
    return std::min(n, total);
}

// Fisher-Yates prefix: picks n distinct positions out of total, in seeded order.
std::vector<std::size_t> pick_distinct(Rng& rng, std::size_t total, std::size_t n) {
    std::vector<std::size_t> idx(total);
    for (std::size_t i = 0; i < total; ++i) idx[i] = i;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = i + rng.bounded(total - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n);
    return idx;
}

// All labels currently present in the set; the replacement pool.
std::vector<std::string> label_pool(const ConstraintSet& set) {
    std::vector<std::string> pool;
    for (const auto& c : set.constraints) {
        if (const auto* n = c.numeric()) pool.push_back(n->entity);
        if (const auto* r = c.relation())
            pool.insert(pool.end(), r->entities.begin(), r->entities.end());
        if (const auto* s = c.structure()) pool.insert(pool.end(), s->parts.begin(), s->parts.end());
    }
    return pool;
}

std::string replacement_label(Rng& rng, const std::vector<std::string>& pool,
                              const std::string& current) {
    const std::string cur = canonical_label(current);
    std::vector<std::string> options;
    for (const auto& p : pool)
        if (canonical_label(p) != cur) options.push_back(p);
    std::sort(options.begin(), options.end());
    options.erase(std::unique(options.begin(), options.end()), options.end());
    if (options.empty()) return current + " phantom";  // no partner to swap with
    return options[rng.bounded(options.size())];
}

double flip_value(Rng& rng, double v) {
    if (v == 0.0) return rng.coin(0.5) ? 1.0 : -1.0;  // scaling zero changes nothing
    return rng.coin(0.5) ? v * 1.5 : v * 0.5;
}

void flip_fields(ConstraintSet& set, const CorruptionSpec& spec) {
    Rng rng(spec.seed);
    const auto fields = enumerate_fields(set);
    const std::size_t n = count_to_touch(spec.ratio, fields.size());
    const auto chosen = pick_distinct(rng, fields.size(), n);
    const auto pool = label_pool(set);

    for (std::size_t which : chosen) {
        const FieldRef f = fields[which];
        Constraint& c = set.constraints[f.constraint];
        if (auto* num = std::get_if<NumericFact>(&c.fact)) {
            if (f.slot == 0)
                num->value = flip_value(rng, num->value);
            else
                num->entity = replacement_label(rng, pool, num->entity);
        } else if (auto* rel = std::get_if<RelationFact>(&c.fact)) {
            if (f.slot == 0) {
                // any other member of the closed relation vocabulary
                const auto& all = all_relation_types();
                std::vector<RelationType> others;
                for (RelationType t : all)
                    if (t != rel->type) others.push_back(t);
                rel->type = others[rng.bounded(others.size())];
            } else {
                auto& label = rel->entities[f.slot - 1];
                label = replacement_label(rng, pool, label);
            }
        } else if (auto* st = std::get_if<StructureFact>(&c.fact)) {
            auto& label = st->parts[f.slot];
            label = replacement_label(rng, pool, label);
        }
    }
}

void shuffle_facts(ConstraintSet& set, const CorruptionSpec& spec) {
    Rng rng(spec.seed);

    auto permute = [&rng](auto getter, std::size_t count) {
        if (count < 2) return;
        std::vector<std::size_t> perm(count);
        for (std::size_t i = 0; i < count; ++i) perm[i] = i;
        for (std::size_t i = count - 1; i > 0; --i)
            std::swap(perm[i], perm[rng.bounded(i + 1)]);
        getter(perm);
    };

    // numeric entities move between numeric facts, detaching values from
    // the objects they measured
    std::vector<NumericFact*> nums;
    for (auto& c : set.constraints)
        if (auto* n = std::get_if<NumericFact>(&c.fact)) nums.push_back(n);
    permute(
        [&](const std::vector<std::size_t>& perm) {
            std::vector<std::string> ents;
            for (auto* n : nums) ents.push_back(n->entity);
            for (std::size_t i = 0; i < nums.size(); ++i) nums[i]->entity = ents[perm[i]];
        },
        nums.size());

    // relation operand lists move between relations
    std::vector<RelationFact*> rels;
    for (auto& c : set.constraints)
        if (auto* r = std::get_if<RelationFact>(&c.fact)) rels.push_back(r);
    permute(
        [&](const std::vector<std::size_t>& perm) {
            std::vector<std::vector<std::string>> ents;
            for (auto* r : rels) ents.push_back(r->entities);
            for (std::size_t i = 0; i < rels.size(); ++i) rels[i]->entities = ents[perm[i]];
        },
        rels.size());

    // part lists move between structures
    std::vector<StructureFact*> structs;
    for (auto& c : set.constraints)
        if (auto* s = std::get_if<StructureFact>(&c.fact)) structs.push_back(s);
    permute(
        [&](const std::vector<std::size_t>& perm) {
            std::vector<std::vector<std::string>> parts;
            for (auto* s : structs) parts.push_back(s->parts);
            for (std::size_t i = 0; i < structs.size(); ++i) structs[i]->parts = parts[perm[i]];
        },
        structs.size());
}

void drop_facts(ConstraintSet& set, const CorruptionSpec& spec) {
    Rng rng(spec.seed);
    const std::size_t n = count_to_touch(spec.ratio, set.constraints.size());
    auto chosen = pick_distinct(rng, set.constraints.size(), n);
    std::sort(chosen.begin(), chosen.end());
    std::vector<Constraint> kept;
    std::size_t next = 0;
    for (std::size_t i = 0; i < set.constraints.size(); ++i) {
        if (next < chosen.size() && chosen[next] == i) {
            ++next;
            continue;
        }
        kept.push_back(std::move(set.constraints[i]));
    }
    set.constraints = std::move(kept);
}

std::string render_value(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

std::string join_naturally(const std::vector<std::string>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) out += i + 1 == xs.size() ? " and " : ", ";
        out += xs[i];
    }
    return out;
}

void caption_only(ConstraintSet& set) {
    std::string text;
    for (const auto& c : set.constraints) {
        std::string phrase;
        if (const auto* n = c.numeric()) {
            phrase = "the " + n->entity + " is " + render_value(n->value);
            if (n->unit) phrase += " " + *n->unit;
        } else if (const auto* r = c.relation()) {
            phrase = join_naturally(r->entities) + " are " + std::string(to_string(r->type));
        } else if (const auto* s = c.structure()) {
            phrase = "a figure composed of " + join_naturally(s->parts);
        } else if (const auto* t = c.caption()) {
            phrase = t->text;
        }
        if (!phrase.empty()) {
            if (!text.empty()) text += "; ";
            text += phrase;
        }
    }
    if (text.empty()) text = "no visible facts";

    Constraint caption;
    caption.fact = CaptionFact{std::move(text)};
    caption.confidence = 1.0;
    set.constraints = {std::move(caption)};
}

}  // namespace

std::size_t mutable_field_count(const ConstraintSet& set) { return enumerate_fields(set).size(); }

ConstraintSet corrupt_constraints(const ConstraintSet& set, const CorruptionSpec& spec) {
    ConstraintSet out = set;
    out.source = Source::Corrupted;
    switch (spec.mode) {
        case CorruptionMode::FlipFields: flip_fields(out, spec); break;
        case CorruptionMode::ShuffleFacts: shuffle_facts(out, spec); break;
        case CorruptionMode::DropFacts: drop_facts(out, spec); break;
        case CorruptionMode::CaptionOnly: caption_only(out); break;
        case CorruptionMode::EmptyFacts: out.constraints.clear(); break;
    }
    return out;
}

}  // namespace evpv
