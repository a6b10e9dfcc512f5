// Copyright 2026 The pqevot Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// evote: keygen, serve, run, report, audit.

#include <csignal>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pqevot/cli/commands.hpp"
#include "pqevot/protocol/manifest.hpp"
#include "pqevot/service/http.hpp"
#include "pqevot/service/node.hpp"

namespace {

using namespace pqevot;
namespace proto = pqevot::protocol;
namespace svc = pqevot::service;
namespace fs = std::filesystem;

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

void wait_for_signal() {
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
}

std::string key_file(proto::Role r) {
    std::string n = proto::to_string(r);
    for (auto& c : n) c = static_cast<char>(std::tolower(c));
    return n + ".key";
}

int keygen(const fs::path& manifest_path, const fs::path& out, std::uint64_t seed, bool tiny) {
    auto mf = proto::load_manifest(manifest_path);
    auto profile = proto::Profile::reference();
    if (tiny) profile.pseudonym = proto::PseudonymParams::tiny();
    auto rng = proto::setup_rng(seed);
    auto setup = proto::prepare_election(mf.manifest, profile, rng);
    fs::create_directories(out);
    cli::write_binary(out / "pp.bin", setup.pp.serialize());
    for (auto r : proto::kAuthorities) {
        auto path = out / key_file(r);
        cli::write_binary(path, setup.secret(r).serialize());
        fs::permissions(path, fs::perms::owner_read | fs::perms::owner_write, fs::perm_options::replace);
    }
    std::cout << "wrote pp.bin (" << setup.pp.serialize().size() << " bytes) and 4 role keys to " << out << "\n";
    return 0;
}

struct ServeArgs {
    std::string role;
    std::string bind = "127.0.0.1:0";
    fs::path keys;
    fs::path manifest;
    fs::path store;
    std::uint64_t seed = 0;
    std::string board;
    std::string vc;
    std::optional<std::int64_t> manual_clock;
    std::vector<std::string> upstream;  // gateway: name=host:port
};

int serve(const ServeArgs& a) {
    auto bind = svc::Address::parse(a.bind);
    if (a.role == "gateway") {
        auto pp = proto::PublicParams::deserialize(cli::read_binary(a.keys / "pp.bin"));
        svc::GatewayConfig gc;
        gc.host = bind.host;
        gc.port = bind.port;
        for (const auto& u : a.upstream) {
            auto eq = u.find('=');
            if (eq == std::string::npos) throw std::invalid_argument("--upstream takes name=host:port");
            gc.upstream.emplace(u.substr(0, eq), svc::Address::parse(u.substr(eq + 1)));
        }
        svc::HttpGateway gw(gc, pp);
        std::cout << "gateway listening on " << bind.host << ":" << gw.port() << std::endl;
        wait_for_signal();
        return 0;
    }

    auto role = svc::parse_node_role(a.role);
    if (!role) throw std::invalid_argument("unknown role " + a.role);
    svc::NodeConfig cfg;
    cfg.role = *role;
    cfg.bind = bind;
    cfg.store = a.store;
    cfg.seed = a.seed;
    if (!a.board.empty()) cfg.board = svc::Address::parse(a.board);
    if (!a.vc.empty()) cfg.vc = svc::Address::parse(a.vc);
    if (a.manual_clock) {
        cfg.manual_clock = true;
        cfg.start_time = *a.manual_clock;
    }

    std::optional<proto::PublicParams> pp;
    std::optional<proto::RoleSecrets> secrets;
    std::vector<std::string> roll;
    if (*role != svc::NodeRole::kBoard) {
        pp = proto::PublicParams::deserialize(cli::read_binary(a.keys / "pp.bin"));
        secrets = proto::RoleSecrets::deserialize(cli::read_binary(a.keys / key_file(svc::authority_of(*role))));
        if (!a.manifest.empty()) {
            auto mf = proto::load_manifest(a.manifest);
            if (!(mf.manifest == pp->manifest)) throw std::invalid_argument("manifest does not match pp.bin");
            roll = std::move(mf.roll);
        }
    }
    svc::RoleNode node(cfg, pp ? &*pp : nullptr, secrets ? &*secrets : nullptr, std::move(roll));
    std::cout << svc::to_string(*role) << " listening on " << node.address().to_string() << " (recovered "
              << node.recovered_records() << " records";
    if (node.truncated_bytes()) std::cout << ", cut " << node.truncated_bytes() << " torn bytes";
    std::cout << ")" << std::endl;
    wait_for_signal();
    return 0;
}

int run(const fs::path& scenario, bool wire, bool parallel, const fs::path& export_board, const fs::path& export_pp,
        bool tables) {
    auto s = cli::load_scenario(scenario);
    cli::RunOptions opt;
    opt.transport = wire ? cli::Transport::kWire : cli::Transport::kInProcess;
    opt.parallel_voters = parallel;
    auto r = cli::run_scenario(s, opt);
    std::cout << cli::format_run(r);
    if (tables) std::cout << "\n" << cli::format_costs(r) << "\n" << cli::format_sizes(r);
    if (!export_board.empty()) cli::export_board(export_board, r.board);
    if (!export_pp.empty()) cli::write_binary(export_pp, r.setup.pp.serialize());
    bool ok = cli::run_as_expected(r);
    std::cout << (ok ? "run as expected\n" : "run NOT as expected\n");
    return ok ? 0 : 1;
}

int report(const fs::path& scenario, const std::string& table, bool wire) {
    auto s = cli::load_scenario(scenario);
    cli::RunOptions opt;
    opt.transport = wire ? cli::Transport::kWire : cli::Transport::kInProcess;
    auto r = cli::run_scenario(s, opt);
    if (table == "1" || table == "both") std::cout << cli::format_costs(r);
    if (table == "both") std::cout << "\n";
    if (table == "2" || table == "both") std::cout << cli::format_sizes(r);
    return cli::costs_match(r) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"evote: multivariate end-to-end verifiable voting"};
    app.require_subcommand(1);

    auto* kg = app.add_subcommand("keygen", "prepare an election: pp.bin and one key file per authority");
    fs::path kg_manifest, kg_out;
    std::uint64_t kg_seed = 0;
    bool kg_tiny = false;
    kg->add_option("--manifest", kg_manifest, "manifest file")->required()->check(CLI::ExistingFile);
    kg->add_option("--out", kg_out, "output directory")->required();
    kg->add_option("--seed", kg_seed, "deterministic key generation (test only)");
    kg->add_flag("--tiny-pseudonym", kg_tiny, "2^16 pseudonym input space (demonstrations only)");

    auto* sv = app.add_subcommand("serve", "run one role endpoint");
    ServeArgs sa;
    sv->add_option("--role", sa.role, "board, rc, po, vc, cc or gateway")->required();
    sv->add_option("--bind", sa.bind, "host:port");
    sv->add_option("--keys", sa.keys, "directory with pp.bin and role keys");
    sv->add_option("--manifest", sa.manifest, "manifest (rc reads the roll from it)");
    sv->add_option("--store", sa.store, "append-only log file");
    sv->add_option("--seed", sa.seed, "role randomness seed (test only)");
    sv->add_option("--board", sa.board, "board address (rc, vc, cc)");
    sv->add_option("--vc", sa.vc, "VC address (po)");
    sv->add_option("--manual-clock", sa.manual_clock, "start a settable clock at this time (test only)");
    sv->add_option("--upstream", sa.upstream, "gateway: name=host:port, repeatable");

    auto* rn = app.add_subcommand("run", "run a scenario file");
    fs::path rn_scenario, rn_board, rn_pp;
    bool rn_wire = false, rn_parallel = false, rn_tables = false;
    rn->add_option("scenario", rn_scenario)->required()->check(CLI::ExistingFile);
    rn->add_flag("--wire", rn_wire, "run through role endpoints on loopback");
    rn->add_flag("--parallel-voters", rn_parallel, "cast ballots from several threads");
    rn->add_flag("--tables", rn_tables, "also print cost and size reports");
    rn->add_option("--export-board", rn_board, "write the board as a log file");
    rn->add_option("--export-pp", rn_pp, "write the public parameters");

    auto* rp = app.add_subcommand("report", "run a scenario and print the cost and size tables");
    fs::path rp_scenario;
    std::string rp_table = "both";
    bool rp_wire = false;
    rp->add_option("scenario", rp_scenario)->required()->check(CLI::ExistingFile);
    rp->add_option("--table", rp_table, "1, 2 or both")->check(CLI::IsMember({"1", "2", "both"}));
    rp->add_flag("--wire", rp_wire, "run through role endpoints on loopback");

    auto* au = app.add_subcommand("audit", "recount a board; exit 0 consistent, 1 discrepancy, 2 not yet public, 3 error");
    fs::path au_board, au_pp;
    au->add_option("--board", au_board, "board log file")->required();
    au->add_option("--pp", au_pp, "public parameters")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*kg) return keygen(kg_manifest, kg_out, kg_seed, kg_tiny);
        if (*sv) return serve(sa);
        if (*rn) return run(rn_scenario, rn_wire, rn_parallel, rn_board, rn_pp, rn_tables);
        if (*rp) return report(rp_scenario, rp_table, rp_wire);
        if (*au) return cli::audit_command(au_board, au_pp, std::cout, std::cerr);
    } catch (const svc::StoreCorrupt& e) {
        std::cerr << "refusing to start: " << e.what() << "\n";
        return 3;
    } catch (const proto::BoardError& e) {
        std::cerr << "refusing to start: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "evote: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
