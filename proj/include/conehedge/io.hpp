#pragma once

// Market files and reports.
//
// A market file is JSON with "schema": 1.  Node intervals come in three
// interchangeable forms (uniform spread factor, explicit per-asset intervals,
// or a frictionless flag); emission always canonicalizes, so emit o parse is
// the identity on the in-memory structures and files round-trip by value.
// Every number is a ratio string: floats never appear on either side.
//
// Reports carry an instance digest (fnv1a over the canonical serialization)
// so any reported value can be reproduced by rerunning the command on a file
// with the same digest.  Everything emitted is deterministic; wall-clock
// timing is opt-in precisely because it would break byte-stability.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "conehedge/claim.hpp"
#include "conehedge/cone.hpp"
#include "conehedge/tree.hpp"

namespace conehedge {

using Json = nlohmann::ordered_json;

// One line every report carries: the single sanctioned deviation from the
// open-set semantics of the underlying theory.
inline const char* kClosureNote =
    "interior-point conditions are decided on closed dual slices and "
    "post-classified, never optimized over open sets";

struct MarketSpecFile {
    ScenarioTree tree;
    Claim claim;
    std::string note;
};

inline uint64_t fnv1a64(const std::string& text) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string digest_hex(const std::string& text) {
    static const char* hex = "0123456789abcdef";
    uint64_t h = fnv1a64(text);
    std::string out = "fnv1a:";
    for (int i = 15; i >= 0; --i) out += hex[(h >> (4 * i)) & 0xF];
    return out;
}

namespace io_detail {

[[noreturn]] inline void fail(const std::string& where, const std::string& what) {
    throw SpecParseError(where + ": " + what);
}

inline void expect_keys(const Json& obj, const std::string& where,
                        std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) fail(where, "expected an object");
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* k : allowed) ok = ok || item.key() == k;
        if (!ok) fail(where, "unknown field '" + item.key() + "'");
    }
}

inline const Json& require(const Json& obj, const std::string& where, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(where, std::string("missing field '") + key + "'");
    return *it;
}

inline Rational ratio(const Json& j, const std::string& where) {
    if (!j.is_string()) fail(where, "numbers must be ratio strings like \"-3/2\"");
    try {
        return parse_rational(j.get<std::string>());
    } catch (const Error& e) {
        fail(where, e.what());
    }
}

inline Vec ratio_vec(const Json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array of ratio strings");
    Vec out;
    for (size_t i = 0; i < j.size(); ++i)
        out.push_back(ratio(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline size_t index(const Json& j, const std::string& where) {
    if (!j.is_number_unsigned()) fail(where, "expected a nonnegative integer");
    return j.get<size_t>();
}

inline Json vec_json(const Vec& v) {
    Json out = Json::array();
    for (const auto& x : v) out.push_back(format_rational(x));
    return out;
}

// claim payoffs keyed by terminal node id, in increasing id order
inline Json payoff_json(const ScenarioTree& tree, const std::vector<Vec>& per_node) {
    Json out = Json::object();
    for (const auto& n : tree.nodes)
        if (tree.is_terminal(n.id)) out[std::to_string(n.id)] = vec_json(per_node[n.id]);
    return out;
}

inline std::vector<Vec> parse_payoffs(const Json& j, const ScenarioTree& tree,
                                      const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object keyed by terminal node id");
    std::vector<Vec> out(tree.nodes.size());
    std::vector<bool> seen(tree.nodes.size(), false);
    for (const auto& item : j.items()) {
        size_t id = 0;
        try {
            size_t pos = 0;
            id = std::stoul(item.key(), &pos);
            if (pos != item.key().size()) throw std::invalid_argument("");
        } catch (...) {
            fail(where, "key '" + item.key() + "' is not a node id");
        }
        if (id >= tree.nodes.size() || !tree.is_terminal(id))
            fail(where, "node " + item.key() + " is not a terminal node");
        Vec v = ratio_vec(item.value(), where + "." + item.key());
        if (v.size() != tree.d)
            fail(where + "." + item.key(), "payoff needs one entry per asset");
        out[id] = std::move(v);
        seen[id] = true;
    }
    for (const auto& n : tree.nodes)
        if (tree.is_terminal(n.id) && !seen[n.id])
            fail(where, "terminal node " + std::to_string(n.id) + " has no payoff");
    return out;
}

}  // namespace io_detail

inline std::string emit_market(const MarketSpecFile& spec) {
    using io_detail::payoff_json;
    using io_detail::vec_json;
    const ScenarioTree& tree = spec.tree;
    Json doc;
    doc["schema"] = 1;
    doc["T"] = tree.T;
    doc["d"] = tree.d;
    doc["nodes"] = Json::array();
    for (const auto& n : tree.nodes) {
        Json jn;
        jn["id"] = n.id;
        if (n.id == tree.root())
            jn["parent"] = nullptr;
        else
            jn["parent"] = n.parent;
        Vec risky(n.cone.mid.begin(), n.cone.mid.end() - 1);
        jn["mid"] = vec_json(risky);
        bool collapsed_at_mid = n.cone.lo == risky && n.cone.hi == risky;
        if (collapsed_at_mid) {
            jn["frictionless"] = true;
        } else {
            jn["intervals"] = Json::object();
            jn["intervals"]["lo"] = vec_json(n.cone.lo);
            jn["intervals"]["hi"] = vec_json(n.cone.hi);
        }
        if (!n.children.empty()) {
            Json ks = Json::array();
            for (const auto& k : n.kernels) ks.push_back(vec_json(k));
            jn["kernels"] = std::move(ks);
        }
        doc["nodes"].push_back(std::move(jn));
    }
    doc["claim"] = Json::object();
    doc["claim"]["xi"] = payoff_json(tree, spec.claim.xi);
    if (!spec.claim.statics.empty()) {
        Json arr = Json::array();
        for (const auto& ins : spec.claim.statics) {
            Json ji;
            ji["zeta"] = payoff_json(tree, ins.zeta);
            ji["cost"] = format_rational(ins.cost);
            arr.push_back(std::move(ji));
        }
        doc["claim"]["statics"] = std::move(arr);
    }
    if (!spec.note.empty()) doc["note"] = spec.note;
    return doc.dump(2) + "\n";
}

inline MarketSpecFile parse_market(const std::string& text) {
    using namespace io_detail;
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw SpecParseError(std::string("invalid JSON: ") + e.what());
    }
    expect_keys(doc, "market", {"schema", "T", "d", "nodes", "claim", "note"});
    if (require(doc, "market", "schema") != Json(1))
        fail("market.schema", "only schema 1 is understood");
    size_t T = index(require(doc, "market", "T"), "market.T");
    size_t d = index(require(doc, "market", "d"), "market.d");
    if (d < 2) fail("market.d", "need at least two assets");
    const Json& jnodes = require(doc, "market", "nodes");
    if (!jnodes.is_array() || jnodes.empty()) fail("market.nodes", "expected a nonempty array");

    TreeBuilder b;
    std::vector<const Json*> kernel_fields(jnodes.size(), nullptr);
    for (size_t id = 0; id < jnodes.size(); ++id) {
        const Json& jn = jnodes[id];
        std::string where = "nodes[" + std::to_string(id) + "]";
        expect_keys(jn, where,
                    {"id", "parent", "mid", "spread", "intervals", "frictionless", "kernels"});
        if (index(require(jn, where, "id"), where + ".id") != id)
            fail(where + ".id", "ids must equal the array position");
        const Json& jparent = require(jn, where, "parent");
        Vec mid = ratio_vec(require(jn, where, "mid"), where + ".mid");
        if (mid.size() != d - 1) fail(where + ".mid", "need one mid price per risky asset");

        int forms = (jn.contains("spread") ? 1 : 0) + (jn.contains("intervals") ? 1 : 0) +
                    (jn.contains("frictionless") ? 1 : 0);
        if (forms != 1)
            fail(where, "exactly one of 'spread', 'intervals', 'frictionless' is required");
        BidAskSpec spec;
        try {
            if (jn.contains("spread")) {
                spec = BidAskSpec::uniform(std::move(mid),
                                           ratio(jn["spread"], where + ".spread"));
            } else if (jn.contains("frictionless")) {
                if (!jn["frictionless"].is_boolean() || !jn["frictionless"].get<bool>())
                    fail(where + ".frictionless", "only the value true is meaningful");
                spec = BidAskSpec::frictionless(std::move(mid));
            } else {
                const Json& ji = jn["intervals"];
                expect_keys(ji, where + ".intervals", {"lo", "hi"});
                Vec lo = ratio_vec(require(ji, where + ".intervals", "lo"),
                                   where + ".intervals.lo");
                Vec hi = ratio_vec(require(ji, where + ".intervals", "hi"),
                                   where + ".intervals.hi");
                spec = BidAskSpec::with_intervals(std::move(mid), std::move(lo), std::move(hi));
            }
        } catch (const SpecParseError&) {
            throw;
        } catch (const Error& e) {
            fail(where, e.what());
        }

        try {
            if (id == 0) {
                if (!jparent.is_null()) fail(where + ".parent", "the root has no parent");
                b.add_root(build_cone(spec, true));
            } else {
                size_t parent = index(jparent, where + ".parent");
                if (parent >= id) fail(where + ".parent", "parents must precede children");
                b.add_child(parent, build_cone(spec, true));
            }
            if (jn.contains("frictionless")) b.set_frictionless(id, true);
        } catch (const SpecParseError&) {
            throw;
        } catch (const Error& e) {
            fail(where, e.what());
        }
        if (jn.contains("kernels")) kernel_fields[id] = &jn["kernels"];
    }

    for (size_t id = 0; id < jnodes.size(); ++id) {
        std::string where = "nodes[" + std::to_string(id) + "].kernels";
        if (!kernel_fields[id]) continue;
        const Json& jk = *kernel_fields[id];
        if (!jk.is_array() || jk.empty()) fail(where, "expected a nonempty array of kernels");
        Mat kernels;
        for (size_t k = 0; k < jk.size(); ++k)
            kernels.push_back(ratio_vec(jk[k], where + "[" + std::to_string(k) + "]"));
        try {
            b.set_kernels(id, std::move(kernels));
        } catch (const Error& e) {
            fail(where, e.what());
        }
    }

    MarketSpecFile out;
    try {
        out.tree = b.finish();
    } catch (const Error& e) {
        fail("market.nodes", e.what());
    }
    for (size_t id = 0; id < jnodes.size(); ++id)
        if (out.tree.node(id).children.empty() && kernel_fields[id])
            fail("nodes[" + std::to_string(id) + "]", "terminal nodes take no kernels");
    if (out.tree.T != T) fail("market.T", "horizon disagrees with the node depths");
    if (out.tree.d != d) fail("market.d", "asset count disagrees with the node data");

    const Json& jclaim = require(doc, "market", "claim");
    expect_keys(jclaim, "claim", {"xi", "statics"});
    out.claim.xi = parse_payoffs(require(jclaim, "claim", "xi"), out.tree, "claim.xi");
    if (jclaim.contains("statics")) {
        const Json& js = jclaim["statics"];
        if (!js.is_array()) fail("claim.statics", "expected an array");
        for (size_t i = 0; i < js.size(); ++i) {
            std::string where = "claim.statics[" + std::to_string(i) + "]";
            expect_keys(js[i], where, {"zeta", "cost"});
            StaticInstrument ins;
            ins.zeta = parse_payoffs(require(js[i], where, "zeta"), out.tree, where + ".zeta");
            ins.cost = ratio(require(js[i], where, "cost"), where + ".cost");
            out.claim.statics.push_back(std::move(ins));
        }
    }
    try {
        validate_claim(out.tree, out.claim);
    } catch (const Error& e) {
        fail("claim", e.what());
    }
    if (doc.contains("note")) {
        if (!doc["note"].is_string()) fail("market.note", "expected a string");
        out.note = doc["note"].get<std::string>();
    }
    return out;
}

}  // namespace conehedge
