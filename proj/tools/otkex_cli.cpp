// otkex command-line front end: parameter generation, the four protocols
// over in-memory or socket transports, and the statistical harness.
//
// Exit codes: 0 success (including fair "no secret received" outcomes),
// 2 protocol violation, 3 transport failure, 4 bad configuration.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "otkex/otkex.hpp"

using namespace otkex;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 2;
constexpr int kExitTransport = 3;
constexpr int kExitConfig = 4;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << text;
}

// Secrets are literal UTF-8, or @path to read file contents.
Bytes secret_arg(const std::string& arg) {
    if (!arg.empty() && arg[0] == '@') return to_bytes(read_file(arg.substr(1)));
    return to_bytes(arg);
}

GroupParams load_params(const std::string& path) {
    GroupParams gp = parse_params(read_file(path));
    auto violations = validate_params(gp);
    if (!violations.empty()) {
        std::string what = "invalid parameters in '" + path + "':";
        for (const auto& v : violations) what += "\n  - " + v;
        throw ConfigError(what);
    }
    return gp;
}

std::uint64_t seed_or_random(std::optional<std::uint64_t> seed) {
    if (seed) return *seed;
    std::random_device rd;
    return std::uint64_t(rd()) << 32 | rd();
}

std::string show_secret(const Bytes& secret, bool raw) {
    return raw ? std::string(secret.begin(), secret.end()) : to_hex(secret);
}

void dump_transcript(const std::string& path, const Transcript& t, const char* label) {
    std::string text = std::string("# ") + label + "\n" + t.to_text();
    std::ofstream out(path, std::ios::app);
    if (!out) throw ConfigError("cannot write transcript to '" + path + "'");
    out << text;
}

// ---------------------------------------------------------------------------
// params
// ---------------------------------------------------------------------------

struct ParamsCmd {
    unsigned bits = 256;
    std::string out_path;
    std::optional<std::uint64_t> seed;

    int run() const {
        if (bits < 16) throw ConfigError("--bits must be at least 16");
        Rng rng(seed_or_random(seed));
        GroupParams gp = generate_params(bits, rng);
        write_file(out_path, serialize_params(gp));
        std::cout << "wrote " << out_path << ": p has " << gp.p.str().size()
                  << " decimal digits (" << bit_length(gp.p) << " bits)\n";
        return kExitOk;
    }
};

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

struct RunCmd {
    std::string protocol;
    std::string params_path;
    std::optional<std::uint64_t> seed;
    std::string listen_addr, connect_addr;
    std::string role;  // alice|bob (zkp: prover|verifier accepted)
    std::string transcript_path;
    bool raw = false;

    // mutual
    std::string secret_a, secret_b, secret;
    // ot
    int choice = 1;
    std::string secret1, secret2;
    // zkp
    unsigned rounds = 16;
    bool imposter = false;
    std::string exponent;

    // test vectors
    bool test_vectors = false;
    std::string force_ga, force_gb, force_exponents;

    bool networked() const { return !listen_addr.empty() || !connect_addr.empty(); }

    std::unique_ptr<Channel> open_channel() const {
        if (!listen_addr.empty()) {
            std::cout << "listening on " << listen_addr << "...\n";
            return socket_listen_one(listen_addr);
        }
        return socket_dial(connect_addr);
    }

    MutualPartyChoices forced_choices(const GroupParams& gp, bool alice_side) const {
        MutualPartyChoices c;
        if (!test_vectors) return c;
        BigNat ga = force_ga.empty() ? gp.g1 : BigNat(force_ga);
        BigNat gb = force_gb.empty() ? gp.g1 : BigNat(force_gb);
        BigNat n1 = 0, n2 = 0, nb = 0;
        if (!force_exponents.empty()) {
            std::istringstream ss(force_exponents);
            std::string tok;
            std::vector<BigNat> vals;
            while (std::getline(ss, tok, ',')) vals.emplace_back(tok);
            if (vals.size() != 3)
                throw ConfigError("--force-exponents wants nA1,nA2,nB");
            n1 = vals[0];
            n2 = vals[1];
            nb = vals[2];
        } else {
            throw ConfigError("--test-vectors needs --force-exponents");
        }
        // symmetric forcing: the same roots and exponents drive both
        // directions, so forced gA == gB makes both directions match
        if (alice_side) {
            c.owner = OwnerChoices{ga, n1, n2};
            c.receiver = ReceiverChoices{ga, nb};
        } else {
            c.owner = OwnerChoices{gb, n1, n2};
            c.receiver = ReceiverChoices{gb, nb};
        }
        return c;
    }

    int run_mutual_memory(const GroupParams& gp, std::uint64_t s) const {
        Bytes sa = secret_arg(secret_a.empty() ? "alice-secret" : secret_a);
        Bytes sb = secret_arg(secret_b.empty() ? "bob-secret" : secret_b);
        SessionOutcome out = run_mutual(gp, forced_choices(gp, true), sa,
                                        forced_choices(gp, false), sb, s);
        std::cout << "direction alice->bob: " << (out.bobGotSA ? "matched" : "not matched")
                  << (out.bobGotSA ? " — bob received S_A: " + show_secret(sa, raw) : "")
                  << "\n";
        std::cout << "direction bob->alice: " << (out.aliceGotSB ? "matched" : "not matched")
                  << (out.aliceGotSB ? " — alice received S_B: " + show_secret(sb, raw) : "")
                  << "\n";
        if (!transcript_path.empty()) {
            dump_transcript(transcript_path, out.aliceTranscript, "alice");
            dump_transcript(transcript_path, out.bobTranscript, "bob");
        }
        return kExitOk;
    }

    int run_mutual_socket(const GroupParams& gp, std::uint64_t s) const {
        Bytes own = secret_arg(secret.empty() ? (role + "-secret") : secret);
        auto ch = open_channel();
        Transcript t;
        const Bytes fp = params_hash(gp);
        Rng rng(s);
        if (role == "alice") {
            MutualAliceRole r(gp, forced_choices(gp, true), own, rng);
            drive_session(r, *ch, t, fp);
            std::cout << (r.received_key_matched()
                              ? "received peer secret: " + show_secret(*r.peer_secret(), raw)
                              : "keys did not match; no secret received")
                      << "\n";
        } else {
            MutualBobRole r(gp, forced_choices(gp, false), own, rng);
            drive_session(r, *ch, t, fp);
            std::cout << (r.received_key_matched()
                              ? "received peer secret: " + show_secret(*r.peer_secret(), raw)
                              : "keys did not match; no secret received")
                      << "\n";
        }
        if (!transcript_path.empty()) dump_transcript(transcript_path, t, role.c_str());
        return kExitOk;
    }

    int run_ot(const GroupParams& gp, std::uint64_t s) const {
        const Bytes fp = params_hash(gp);
        OtChoice ch = choice == 1 ? OtChoice::First : OtChoice::Second;
        if (!networked()) {
            ChannelPair pair = memory_channel_pair();
            Rng master(s);
            OtAliceRole alice(gp, {secret_arg(secret1), secret_arg(secret2)}, std::nullopt,
                              master.fork());
            OtBobRole bob(gp, ch, std::nullopt, master.fork());
            Transcript ta, tb;
            std::thread t([&] { drive_session(bob, *pair.second, tb, fp); });
            drive_session(alice, *pair.first, ta, fp);
            t.join();
            std::cout << "bob chose secret " << choice << " and received: "
                      << show_secret(*bob.received_secret(), raw) << "\n";
            if (!transcript_path.empty()) {
                dump_transcript(transcript_path, ta, "alice");
                dump_transcript(transcript_path, tb, "bob");
            }
            return kExitOk;
        }
        auto chan = open_channel();
        Transcript t;
        Rng rng(s);
        if (role == "alice") {
            OtAliceRole r(gp, {secret_arg(secret1), secret_arg(secret2)}, std::nullopt, rng);
            drive_session(r, *chan, t, fp);
            std::cout << "sent both ciphertexts; receiver's choice stays hidden\n";
        } else {
            OtBobRole r(gp, ch, std::nullopt, rng);
            drive_session(r, *chan, t, fp);
            std::cout << "received secret " << choice << ": "
                      << show_secret(*r.received_secret(), raw) << "\n";
        }
        if (!transcript_path.empty()) dump_transcript(transcript_path, t, role.c_str());
        return kExitOk;
    }

    int run_coinflip(const GroupParams& gp, std::uint64_t s) const {
        const Bytes fp = params_hash(gp);
        auto oc = test_vectors ? std::optional<OwnerChoices>(forced_choices(gp, true).owner)
                               : std::nullopt;
        auto rc = test_vectors
                      ? std::optional<ReceiverChoices>(forced_choices(gp, false).receiver)
                      : std::nullopt;
        if (!networked()) {
            ChannelPair pair = memory_channel_pair();
            Rng master(s);
            Transcript ta, tb;
            CoinAliceRole alice(gp, oc, master.fork());
            CoinBobRole bob(gp, rc, master.fork(), &tb);
            std::thread t([&] { drive_session(bob, *pair.second, tb, fp); });
            drive_session(alice, *pair.first, ta, fp);
            t.join();
            std::cout << "result: " << (*alice.winner() == CoinWinner::BobWins ? "bob" : "alice")
                      << " wins; bob verified the reveal: " << (bob.verified() ? "yes" : "NO")
                      << "\n";
            if (!transcript_path.empty()) {
                dump_transcript(transcript_path, ta, "alice");
                dump_transcript(transcript_path, tb, "bob");
            }
            return bob.verified() ? kExitOk : kExitViolation;
        }
        auto chan = open_channel();
        Transcript t;
        Rng rng(s);
        if (role == "alice") {
            CoinAliceRole r(gp, oc, rng);
            drive_session(r, *chan, t, fp);
            std::cout << "result: " << (*r.winner() == CoinWinner::BobWins ? "bob" : "alice")
                      << " wins\n";
            if (!transcript_path.empty()) dump_transcript(transcript_path, t, "alice");
            return kExitOk;
        }
        CoinBobRole r(gp, rc, rng, &t);
        drive_session(r, *chan, t, fp);
        std::cout << "result: " << (*r.winner() == CoinWinner::BobWins ? "bob" : "alice")
                  << " wins; reveal verified: " << (r.verified() ? "yes" : "NO") << "\n";
        if (!transcript_path.empty()) dump_transcript(transcript_path, t, "bob");
        return r.verified() ? kExitOk : kExitViolation;
    }

    int run_zkp(const GroupParams& gp, std::uint64_t s) const {
        const Bytes fp = params_hash(gp);
        Rng rng(s);
        BigNat e = exponent.empty() ? rand_unit_exponent(gp.p, rng) : BigNat(exponent);
        ZkPublic pub = make_zk_public(gp.p, gp.x, e);

        auto make_strategy = [&]() -> std::unique_ptr<ProverStrategy> {
            if (imposter) return std::make_unique<ImposterProver>();
            return std::make_unique<HonestProver>(e);
        };

        if (!networked()) {
            ChannelPair pair = memory_channel_pair();
            Rng master(s);
            auto strategy = make_strategy();
            ZkProverRole prover(pub, *strategy, rounds, master.fork());
            ZkVerifierRole verifier(pub, rounds, master.fork());
            Transcript tp, tv;
            std::thread t([&] { drive_session(verifier, *pair.second, tv, fp); });
            drive_session(prover, *pair.first, tp, fp);
            t.join();
            std::cout << "prover (" << (imposter ? "imposter" : "honest") << ", t=" << rounds
                      << "): " << (verifier.accepted() ? "ACCEPTED" : "rejected") << " after "
                      << verifier.rounds_run() << " round(s)\n";
            if (!transcript_path.empty()) {
                dump_transcript(transcript_path, tp, "prover");
                dump_transcript(transcript_path, tv, "verifier");
            }
            return kExitOk;
        }
        auto chan = open_channel();
        Transcript t;
        if (role == "alice" || role == "prover") {
            auto strategy = make_strategy();
            ZkProverRole r(pub, *strategy, rounds, rng);
            drive_session(r, *chan, t, fp);
            std::cout << "verifier verdict: " << (*r.accepted() ? "ACCEPTED" : "rejected")
                      << "\n";
        } else {
            ZkVerifierRole r(pub, rounds, rng);
            drive_session(r, *chan, t, fp);
            std::cout << "verdict: " << (r.accepted() ? "ACCEPTED" : "rejected") << " after "
                      << r.rounds_run() << " round(s)\n";
        }
        if (!transcript_path.empty()) dump_transcript(transcript_path, t, role.c_str());
        return kExitOk;
    }

    int run() const {
        if (networked() && role.empty())
            throw ConfigError("networked mode needs --role together with --listen/--connect");
        if (!listen_addr.empty() && !connect_addr.empty())
            throw ConfigError("--listen and --connect are mutually exclusive");
        GroupParams gp = load_params(params_path);
        const std::uint64_t s = seed_or_random(seed);
        std::cout << "seed: " << s << "\n";
        if (protocol == "mutual")
            return networked() ? run_mutual_socket(gp, s) : run_mutual_memory(gp, s);
        if (protocol == "ot") return run_ot(gp, s);
        if (protocol == "coinflip") return run_coinflip(gp, s);
        if (protocol == "zkp") return run_zkp(gp, s);
        throw ConfigError("unknown protocol '" + protocol + "'");
    }
};

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateCmd {
    std::string protocol;
    std::uint64_t trials = 10000;
    std::optional<std::uint64_t> seed;
    std::string params_path;
    unsigned bits = 64;
    unsigned rounds = 8;
    std::string csv_path;

    static std::string pm(double rate, std::uint64_t n) {
        const double se = std::sqrt(rate * (1 - rate) / double(n));
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.4f ± %.4f", rate, se);
        return buf;
    }

    int run() const {
        if (trials < 1) throw ConfigError("--trials must be >= 1");
        const std::uint64_t s = seed_or_random(seed);
        GroupParams gp;
        if (!params_path.empty()) {
            gp = load_params(params_path);
        } else {
            Rng rng(s ^ 0x9a7a);
            gp = generate_params(bits, rng);
        }
        std::unique_ptr<CsvWriter> csv;
        if (!csv_path.empty()) csv = std::make_unique<CsvWriter>(csv_path);

        std::cout << "protocol=" << protocol << " trials=" << trials << " seed=" << s
                  << " p_bits=" << bit_length(gp.p) << "\n";

        if (protocol == "mutual") {
            MutualStats st = simulate_mutual(gp, trials, s, csv.get());
            std::cout << "match rate:        " << pm(st.match_rate(), trials) << "  (expect 0.5)\n"
                      << "both-failed rate:  " << pm(st.both_failed_rate(), trials)
                      << "  (expect 0.25)\n";
        } else if (protocol == "coinflip") {
            CoinStats st = simulate_coinflip(gp, trials, s, csv.get());
            std::cout << "bob wins:          " << pm(st.bob_win_rate(), trials)
                      << "  (expect 0.5)\n";
        } else if (protocol == "ot") {
            OtStats st = simulate_ot(gp, trials, s, csv.get());
            std::cout << "chosen recovered:  " << st.chosen_recovered << "/" << st.trials
                      << "  (expect all)\n"
                      << "unchosen leaked:   " << st.unchosen_leaked << "/" << st.trials
                      << "  (expect none)\n";
        } else if (protocol == "zkp") {
            Rng rng(s ^ 0x717);
            BigNat e = rand_unit_exponent(gp.p, rng);
            ZkPublic pub = make_zk_public(gp.p, gp.x, e);
            ZkStats honest = simulate_zkp(pub, e, rounds, trials, s, nullptr);
            ZkStats imposter = simulate_zkp(pub, std::nullopt, rounds, trials, s + 1, csv.get());
            std::cout << "honest accepted:   " << honest.accepted << "/" << honest.trials
                      << "  (expect all)\n"
                      << "imposter accepted: " << pm(imposter.accept_rate(), trials)
                      << "  (expect ~" << std::pow(2.0, -double(rounds)) << " at t=" << rounds
                      << ")\n";
        } else if (protocol == "cheat") {
            CheatStats matched = simulate_cheat(gp, trials, s, true, csv.get());
            CheatStats unmatched = simulate_cheat(gp, trials, s + 1, false, nullptr);
            std::cout << "recovered after matched abort:   " << matched.recovered << "/"
                      << matched.trials << "  (expect all)\n"
                      << "recovered after unmatched abort: " << unmatched.recovered << "/"
                      << unmatched.trials << "  (expect none)\n";
        } else {
            throw ConfigError("unknown protocol '" + protocol + "'");
        }
        return kExitOk;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"oblivious key exchange protocol suite"};
    app.require_subcommand(1);

    ParamsCmd params_cmd;
    auto* sp = app.add_subcommand("params", "generate a group parameter file");
    sp->add_option("--bits", params_cmd.bits, "prime size in bits (min 16)")
        ->capture_default_str();
    sp->add_option("--out", params_cmd.out_path, "output file")->required();
    sp->add_option("--seed", params_cmd.seed, "deterministic seed");

    RunCmd run_cmd;
    auto* sr = app.add_subcommand("run", "run one protocol session");
    sr->add_option("protocol", run_cmd.protocol, "mutual|ot|coinflip|zkp")->required();
    sr->add_option("--params", run_cmd.params_path, "parameter file")->required();
    sr->add_option("--seed", run_cmd.seed, "deterministic seed");
    sr->add_option("--listen", run_cmd.listen_addr, "listen on host:port");
    sr->add_option("--connect", run_cmd.connect_addr, "connect to host:port");
    sr->add_option("--role", run_cmd.role, "alice|bob (zkp: prover|verifier)");
    sr->add_option("--transcript", run_cmd.transcript_path, "append transcript dump here");
    sr->add_flag("--raw", run_cmd.raw, "print secrets raw instead of hex");
    sr->add_option("--secret-a", run_cmd.secret_a, "alice's secret (memory mutual)");
    sr->add_option("--secret-b", run_cmd.secret_b, "bob's secret (memory mutual)");
    sr->add_option("--secret", run_cmd.secret, "own secret (networked mutual)");
    sr->add_option("--choice", run_cmd.choice, "ot receiver choice (1 or 2)")
        ->check(CLI::IsMember({1, 2}));
    sr->add_option("--secret1", run_cmd.secret1, "ot secret bound to g1");
    sr->add_option("--secret2", run_cmd.secret2, "ot secret bound to g2");
    sr->add_option("-t,--rounds", run_cmd.rounds, "zkp rounds")->capture_default_str();
    sr->add_flag("--imposter", run_cmd.imposter, "zkp prover without the witness");
    sr->add_option("--exponent", run_cmd.exponent, "zkp witness exponent (decimal)");
    auto* tv = sr->add_flag("--test-vectors", run_cmd.test_vectors,
                            "enable forced-choice flags for reproducing worked examples");
    sr->add_option("--force-ga", run_cmd.force_ga, "force alice's root")->needs(tv);
    sr->add_option("--force-gb", run_cmd.force_gb, "force bob's root")->needs(tv);
    sr->add_option("--force-exponents", run_cmd.force_exponents, "nA1,nA2,nB")->needs(tv);

    SimulateCmd sim_cmd;
    auto* ss = app.add_subcommand("simulate", "run seeded statistical trials");
    ss->add_option("protocol", sim_cmd.protocol, "mutual|coinflip|ot|zkp|cheat")->required();
    ss->add_option("--trials", sim_cmd.trials, "number of trials")->capture_default_str();
    ss->add_option("--seed", sim_cmd.seed, "deterministic seed");
    ss->add_option("--params", sim_cmd.params_path, "parameter file (default: generate)");
    ss->add_option("--bits", sim_cmd.bits, "bits for generated params")->capture_default_str();
    ss->add_option("-t,--rounds", sim_cmd.rounds, "zkp rounds")->capture_default_str();
    ss->add_option("--csv", sim_cmd.csv_path, "write per-trial rows here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sp->parsed()) return params_cmd.run();
        if (sr->parsed()) return run_cmd.run();
        if (ss->parsed()) return sim_cmd.run();
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const MalformedField& e) {
        std::cerr << "parameter file error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const TransportError& e) {
        std::cerr << "transport error: " << e.what() << "\n";
        return kExitTransport;
    } catch (const ProtocolViolation& e) {
        std::cerr << "protocol violation: " << e.what() << "\n";
        return kExitViolation;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitViolation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}
