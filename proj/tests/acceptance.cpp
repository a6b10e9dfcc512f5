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


// One line per acceptance criterion. Exit status is the number of failures.

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pqevot/cli/commands.hpp"
#include "pqevot/mqe.hpp"
#include "pqevot/mqs.hpp"

namespace {

using namespace pqevot;
namespace fs = std::filesystem;

const fs::path kSource = PQEVOT_SOURCE_DIR;

cli::RunResult run(const std::string& name, cli::Transport t = cli::Transport::kInProcess) {
    cli::RunOptions opt;
    opt.transport = t;
    return cli::run_scenario(cli::load_scenario(kSource / "scenarios" / (name + ".scn")), opt);
}

struct Criterion {
    std::string name;
    std::function<bool(std::ostream&)> check;
};

bool honest_correctness(std::ostream& why) {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    for (const char* name : {"honest-10", "honest-50", "honest-200"}) {
        auto r = run(name);
        bool good = r.tally && r.tally_matches_script && r.audit.consistent();
        why << name << " L=" << r.setup.pp.candidate_count() << (good ? " ok" : " BAD") << "; ";
        ok = ok && good;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    why << "total " << secs << " s";
    return ok && secs < 60.0;
}

bool cost_table(std::ostream& why) {
    bool ok = true;
    for (const char* name : {"honest-10", "honest-50", "honest-200"}) {
        auto r = run(name);
        std::size_t bad = 0;
        for (const auto& row : cli::cost_rows(r))
            if (!row.equal()) ++bad;
        why << "L=" << r.setup.pp.candidate_count() << " " << bad << " rows differ; ";
        ok = ok && bad == 0 && r.volumes.cast > 0;
    }
    return ok;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Drops the leading '#' license block.
std::string golden(const fs::path& p) {
    std::istringstream in(slurp(p));
    std::string line, out;
    bool head = true;
    while (std::getline(in, line)) {
        if (head && (line.empty() || line[0] == '#')) continue;
        head = false;
        out += line + "\n";
    }
    return out;
}

bool size_table(std::ostream& why) {
    auto r = run("honest-10");
    auto p = cli::size_primitives(r);
    auto rows = cli::size_rows(r);
    auto find = [&](const std::string& prefix) -> const cli::SizeRow& {
        for (const auto& row : rows)
            if (row.item.rfind(prefix, 0) == 0) return row;
        throw std::logic_error("no row " + prefix);
    };
    // Independent arithmetic: length prefix + 40 field elements + 16-byte salt.
    bool ok = p.s == 4 + 40 + 16 && p.commit == 32 && p.opening == 32;
    ok = ok && find("Ticket").measured == 20 + p.s;
    ok = ok && find("Vote").measured == p.s + p.commit + p.opening;
    ok = ok && find("Vote").delta() == static_cast<long long>(p.opening);
    ok = ok && find("Ticket").delta() == 20;
    ok = ok && find("Cast ballot").measured == p.e_overhead + find("Ticket").measured + find("Ballot").measured;
    ok = ok && find("Public parameters").table_bytes == 4 * (p.sk_e + p.pk_e + p.sk_s + p.pk_s);
    bool golden_ok = cli::format_sizes(r) == golden(kSource / "tests" / "golden" / "sizes-honest-10.txt");
    why << "|S|=" << p.s << " |E| overhead=" << p.e_overhead << " |Commit|=" << p.commit << "; compositions "
        << (ok ? "ok" : "BAD") << "; golden " << (golden_ok ? "matches" : "DIFFERS");
    return ok && golden_ok;
}

bool adversary_suite(std::ostream& why) {
    bool ok = true;
    for (const char* name : {"replay-ticket", "outsider", "vc-withhold", "cc-inflate", "collude", "collude-reference"}) {
        auto r = run(name);
        bool good = !r.outcomes.empty() && r.directives_pass() && cli::run_as_expected(r);
        why << name << (good ? " ok" : " BAD") << "; ";
        ok = ok && good;
    }
    return ok;
}

template <class F>
bool rejected(F&& f) {
    try {
        return !f();
    } catch (const std::exception&) {
        return true;
    }
}

bool crypto_suites(std::ostream& why) {
    auto rng = Drbg::from_seed(7001);
    auto sk = mqs::keygen(mqs::Params::reference(), rng);
    auto ek = mqe::keygen(mqe::Params::reference(), rng);
    std::size_t enc_fail = 0, sig_fail = 0, sig_accept = 0, ct_accept = 0, comp_sig = 0, comp_enc = 0, gf_bad = 0;
    for (int i = 0; i < 1000; ++i) {
        auto msg = rng.bytes(1 + rng.uniform(128));
        auto ct = mqe::encrypt(ek.public_key, msg, rng);
        auto pt = mqe::decrypt(ek.secret, ct);
        if (!pt || *pt != msg) ++enc_fail;

        auto sig = mqs::sign(sk.signing, msg, rng);
        if (!mqs::verify(msg, sig, sk.verification)) ++sig_fail;

        auto sb = sig.serialize();
        sb[rng.uniform(sb.size())] ^= std::uint8_t(1 + rng.uniform(255));
        if (!rejected([&] { return mqs::verify(msg, mqs::Signature::deserialize(sb), sk.verification); }))
            ++sig_accept;

        auto cb = ct.serialize();
        cb[rng.uniform(cb.size())] ^= std::uint8_t(1 + rng.uniform(255));
        if (!rejected([&] { return mqe::decrypt(ek.secret, mqe::Ciphertext::deserialize(cb)).has_value(); }))
            ++ct_accept;

        auto x = gf::Vector::random(sk.verification.inputs(), rng);
        if (sk.verification.eval(x).raw_bytes() !=
            oracle::pointwise_compose(sk.signing.outer, sk.signing.central, sk.signing.inner, x.raw_bytes()))
            ++comp_sig;
        auto y = gf::Vector::random(ek.public_key.inputs(), rng);
        if (ek.public_key.eval(y).raw_bytes() !=
            oracle::pointwise_compose(ek.secret.outer, ek.secret.central, ek.secret.inner, y.raw_bytes()))
            ++comp_enc;
    }
    for (int a = 0; a < 256; ++a)
        for (int b = 0; b < 256; ++b)
            if ((gf::Element(std::uint8_t(a)) * gf::Element(std::uint8_t(b))).value() !=
                oracle::peasant_mul(std::uint8_t(a), std::uint8_t(b)))
                ++gf_bad;
    why << "mqe roundtrip failures " << enc_fail << ", mqs completeness failures " << sig_fail
        << ", tampered signatures accepted " << sig_accept << ", tampered ciphertexts accepted " << ct_accept
        << ", composition mismatches " << comp_sig << "/" << comp_enc << ", gf mismatches " << gf_bad << "/65536";
    return enc_fail + sig_fail + sig_accept + ct_accept + comp_sig + comp_enc + gf_bad == 0;
}

bool wire_equivalence(std::ostream& why) {
    auto local = run("honest-10");
    auto wire = run("honest-10", cli::Transport::kWire);
    bool same = !local.board.empty() && local.board.size() == wire.board.size();
    for (std::size_t i = 0; same && i < local.board.size(); ++i)
        same = local.board[i].serialize() == wire.board[i].serialize();
    why << local.board.size() << " vs " << wire.board.size() << " entries, " << (same ? "byte-identical" : "DIFFER");
    return same;
}

}  // namespace

int main() {
    std::vector<Criterion> all = {
        {"honest-election correctness", honest_correctness},
        {"operation-count table", cost_table},
        {"size table", size_table},
        {"adversary suite", adversary_suite},
        {"crypto property suites", crypto_suites},
        {"wire/in-process equivalence", wire_equivalence},
    };
    int failures = 0;
    for (const auto& c : all) {
        std::ostringstream why;
        bool ok = false;
        try {
            ok = c.check(why);
        } catch (const std::exception& e) {
            why << "threw: " << e.what();
        }
        if (!ok) ++failures;
        std::cout << (ok ? "PASS " : "FAIL ") << c.name << ": " << why.str() << std::endl;
    }
    return failures;
}
