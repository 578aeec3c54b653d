// Command-line front end.  Every subcommand parses a market file (or, for
// generate, emits one), calls the matching report builder, and writes the
// JSON document.  Exit codes: 0 when a verdict was computed (finding
// arbitrage is a verdict), 2 on malformed inputs or unsupported requests,
// 1 only when an internal invariant breaks.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "conehedge/generate.hpp"
#include "conehedge/reports.hpp"

using namespace conehedge;

namespace {

struct CommonArgs {
    std::string file;
    std::string out;
    size_t theta_res = 3;
    bool timing = false;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SpecParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_out(const std::string& out, const std::string& text) {
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw SpecParseError("cannot write '" + out + "'");
    f << text;
}

struct Loaded {
    MarketSpecFile spec;
    std::string digest;
};

Loaded load(const std::string& path) {
    Loaded l;
    l.spec = parse_market(slurp(path));
    l.digest = digest_hex(emit_market(l.spec));
    return l;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool theta) {
    cmd->add_option("file", args.file, "market spec (json)")->required();
    cmd->add_option("--out", args.out, "write the report here instead of stdout");
    cmd->add_flag("--timing", args.timing, "append wall-clock duration to the report");
    if (theta)
        cmd->add_option("--theta-res", args.theta_res,
                        "grid points per price interval axis")
            ->check(CLI::Range(static_cast<size_t>(2), static_cast<size_t>(64)));
}

void finish(const CommonArgs& args, Json doc,
            std::chrono::steady_clock::time_point start) {
    if (args.timing) {
        auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
        doc["elapsed_ms"] = ms;
    }
    write_out(args.out, doc.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"super-replication pricing on scenario trees with bid-ask spreads"};
    app.require_subcommand(1);

    CommonArgs price_args;
    std::string route = "all";
    auto* cmd_price = app.add_subcommand("price", "price a claim along one or all routes");
    add_common(cmd_price, price_args, true);
    cmd_price->add_option("--route", route, "primal|dual|enlarged|dp|all")
        ->check(CLI::IsMember({"primal", "dual", "enlarged", "dp", "all"}));

    CommonArgs hedge_args;
    auto* cmd_hedge = app.add_subcommand("hedge", "price and emit the hedge certificate");
    add_common(cmd_hedge, hedge_args, false);

    CommonArgs na2_args;
    auto* cmd_na2 = app.add_subcommand("check-na2", "one-step no-arbitrage verdict");
    add_common(cmd_na2, na2_args, false);

    CommonArgs na_args;
    auto* cmd_na =
        app.add_subcommand("check-na", "frictionless no-arbitrage on the enlarged market");
    add_common(cmd_na, na_args, true);

    CommonArgs scps_args;
    auto* cmd_scps =
        app.add_subcommand("find-scps", "search for a strictly consistent price system");
    add_common(cmd_scps, scps_args, false);

    CommonArgs robust_args;
    auto* cmd_robust = app.add_subcommand("robustness-check",
                                          "screen static instrument premia for free lunches");
    add_common(cmd_robust, robust_args, false);

    CommonArgs verify_args;
    bool oracle = false;
    auto* cmd_verify = app.add_subcommand("verify", "run every cross-check on one instance");
    add_common(cmd_verify, verify_args, true);
    cmd_verify->add_flag("--oracle", oracle, "also compare against the exhaustive oracle");

    auto* cmd_gen = app.add_subcommand("generate", "emit a random market spec");
    GenOptions gen;
    std::string gen_out;
    std::string na2_text = "yes";
    cmd_gen->add_option("--seed", gen.seed, "generator seed")->required();
    cmd_gen->add_option("--T", gen.T, "horizon (at most 4)");
    cmd_gen->add_option("--d", gen.d, "number of assets including cash (at most 4)");
    cmd_gen->add_option("--branching", gen.branching, "maximum fanout (at most 4)");
    cmd_gen->add_option("--kernels", gen.kernels, "maximum kernels per node");
    cmd_gen->add_option("--statics", gen.statics, "static instruments to attach");
    cmd_gen->add_option("--na2", na2_text, "yes|no|any")
        ->check(CLI::IsMember({"yes", "no", "any"}));
    cmd_gen->add_option("--out", gen_out, "write the spec here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    auto start = std::chrono::steady_clock::now();
    try {
        if (cmd_price->parsed()) {
            auto l = load(price_args.file);
            finish(price_args,
                   price_report(l.spec, l.digest, price_args.file, route,
                                price_args.theta_res),
                   start);
        } else if (cmd_hedge->parsed()) {
            auto l = load(hedge_args.file);
            finish(hedge_args, hedge_report(l.spec, l.digest, hedge_args.file), start);
        } else if (cmd_na2->parsed()) {
            auto l = load(na2_args.file);
            finish(na2_args, check_na2_report(l.spec, l.digest, na2_args.file), start);
        } else if (cmd_na->parsed()) {
            auto l = load(na_args.file);
            finish(na_args,
                   check_na_report(l.spec, l.digest, na_args.file, na_args.theta_res),
                   start);
        } else if (cmd_scps->parsed()) {
            auto l = load(scps_args.file);
            finish(scps_args, find_scps_report(l.spec, l.digest, scps_args.file), start);
        } else if (cmd_robust->parsed()) {
            auto l = load(robust_args.file);
            finish(robust_args, robustness_report(l.spec, l.digest, robust_args.file),
                   start);
        } else if (cmd_verify->parsed()) {
            auto l = load(verify_args.file);
            finish(verify_args,
                   verify_report(l.spec, l.digest, verify_args.file,
                                 verify_args.theta_res, oracle),
                   start);
        } else if (cmd_gen->parsed()) {
            gen.na2 = na2_text == "yes"  ? Na2Mode::Yes
                      : na2_text == "no" ? Na2Mode::No
                                         : Na2Mode::Any;
            auto inst = generate(gen);
            MarketSpecFile spec;
            spec.tree = std::move(inst.tree);
            spec.claim = std::move(inst.claim);
            spec.note = inst.note;
            write_out(gen_out, emit_market(spec));
        }
    } catch (const LpError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
