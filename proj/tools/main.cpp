#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rcfhe/bench.hpp"
#include "rcfhe/config.hpp"
#include "rcfhe/control.hpp"
#include "rcfhe/encrypted_loop.hpp"
#include "rcfhe/keys.hpp"
#include "rcfhe/params.hpp"
#include "rcfhe/selftest.hpp"
#include "rcfhe/transport.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;
constexpr int exit_verify = 3;
constexpr int exit_io = 4;

struct IoFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw IoFailure("cannot write " + path);
    return os;
}

const char* csv_help =
    "CSV schemas:\n"
    "  bench:      op,repr,n,ell,word_mults,word_adds,bit_ops,wall_ns\n"
    "  trajectory: t,theta1,dtheta1,theta2,dtheta2,T,u,xhat1,xhat2,xhat3,xhat4,xhat5,y1,y2\n"
    "  step bench: step,word_mults,word_adds,bit_ops,wall_ns\n"
    "  gains:      name,row,col,real,word,quantized\n"
    "Exit codes: 0 success, 2 usage, 3 verification failure, 4 IO\n";

struct KeygenArgs {
    std::uint32_t n = 7, m = 7, ell = 64, m_q = 10, n_q = 22, noise_bound = 15;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_keygen(const KeygenArgs& a)
{
    const rcfhe::Params p = rcfhe::make_params(a.n, a.m, a.ell, a.m_q, a.n_q, a.noise_bound);
    rcfhe::Rng rng(a.seed);
    const rcfhe::KeyPair keys = rcfhe::keygen(p, rng);
    {
        auto os = open_out(a.out);
        rcfhe::write_key_file(os, keys);
        if (!os)
            throw IoFailure("write failed for " + a.out);
    }
    std::cout << rcfhe::describe(p) << "\n"
              << "secret key: " << keys.secret.s.size() << " words\n"
              << "public key: " << keys.pub.A.rows() << " x " << keys.pub.A.cols() << "\n"
              << "cipher: " << p.N << " x " << p.N << " bits, reduced " << p.N << " x "
              << p.width() << " words\n"
              << "fingerprint: " << rcfhe::fingerprint(keys) << "\n";
    return exit_ok;
}

struct BenchArgs {
    std::string ops = "add,mul,scalar_mul,scalar_add";
    std::string ells = "8,16,32";
    std::string repr = "both";
    std::string csv;
    std::uint64_t seed = 1;
};

int cmd_bench(const BenchArgs& a)
{
    rcfhe::BenchOptions opts;
    opts.ops = split_list(a.ops);
    opts.ells.clear();
    for (const auto& s : split_list(a.ells))
        opts.ells.push_back(static_cast<std::uint32_t>(std::stoul(s)));
    opts.reduced = a.repr != "full";
    opts.full = a.repr != "reduced";
    opts.seed = a.seed;
    const auto rows = rcfhe::run_bench(opts);
    if (a.csv.empty()) {
        rcfhe::write_bench_csv(std::cout, rows);
    } else {
        auto os = open_out(a.csv);
        rcfhe::write_bench_csv(os, rows);
        std::cout << "wrote " << rows.size() << " rows to " << a.csv << "\n";
    }
    return exit_ok;
}

struct SimulateArgs {
    std::string config;
    std::uint64_t seed = 1;
    double duration = 10.0;
    std::string transport = "inprocess";
    std::string mode = "encrypted";
    bool verify = false;
    std::string csv_out, bench_out, gains_out;
};

int cmd_simulate(const SimulateArgs& a, const CLI::App& sub)
{
    rcfhe::LoopConfig cfg;
    if (!a.config.empty())
        cfg = rcfhe::load_config(a.config);
    if (sub.count("--seed"))
        cfg.seed = a.seed;
    if (sub.count("--duration"))
        cfg.duration_s = a.duration;
    if (sub.count("--transport"))
        cfg.transport = rcfhe::parse_transport(a.transport);
    if (sub.count("--mode"))
        cfg.mode = rcfhe::parse_mode(a.mode);
    if (sub.count("--verify"))
        cfg.verify = a.verify;
    if (cfg.verify && cfg.mode != rcfhe::LoopMode::Encrypted)
        throw rcfhe::ConfigError("--verify needs mode encrypted");

    const rcfhe::TraceLog log = rcfhe::run_closed_loop(cfg);

    if (!a.csv_out.empty()) {
        auto os = open_out(a.csv_out);
        rcfhe::write_trajectory_csv(os, log);
    }
    if (!a.bench_out.empty()) {
        auto os = open_out(a.bench_out);
        rcfhe::write_step_bench_csv(os, log);
    }
    if (!a.gains_out.empty()) {
        auto os = open_out(a.gains_out);
        const rcfhe::Params p = rcfhe::make_params(7, 7, 64, 10, 22, cfg.noise_bound);
        rcfhe::write_gain_csv(os, rcfhe::loop_gains(cfg, p));
    }

    double late = 0;
    for (const auto& r : log.rows)
        if (r.t > 5.0)
            late = std::max({late, std::abs(r.x.theta1), std::abs(r.x.theta2)});
    const auto& last = log.rows.back();
    std::cout << "mode " << rcfhe::to_string(cfg.mode) << ", transport "
              << rcfhe::to_string(cfg.transport) << ", " << log.rows.size() << " steps\n"
              << "final theta1 " << last.x.theta1 << " theta2 " << last.x.theta2 << "\n"
              << "max |theta| for t > 5 s: " << late << "\n";
    if (!log.controller.empty()) {
        std::uint64_t ns = 0, mults = 0;
        for (const auto& s : log.controller) {
            ns += s.wall_ns;
            mults += s.counters.word_mults;
        }
        std::cout << "controller step: mean " << ns / log.controller.size() / 1000.0
                  << " us, word_mults " << mults << "\n"
                  << "bytes to controller " << log.bytes_to_controller << ", to adapter "
                  << log.bytes_to_adapter << "\n";
    }
    if (cfg.verify)
        std::cout << "verify: all " << log.rows.size()
                  << " steps match the fixed-point twin, max noise " << log.max_noise << "\n";
    return exit_ok;
}

struct SelftestArgs {
    std::uint64_t seed = 1;
    int trials = 20;
    bool mutate = false;
};

int cmd_selftest(const SelftestArgs& a)
{
    rcfhe::SelftestOptions opts;
    opts.seed = a.seed;
    opts.trials = a.trials;
    opts.mutate_flatten = a.mutate;
    bool ok = true;
    for (const auto& r : rcfhe::run_selftest(opts)) {
        std::cout << (r.pass ? "PASS " : "FAIL ") << r.name;
        if (!r.pass)
            std::cout << ": " << r.detail;
        std::cout << "\n";
        ok = ok && r.pass;
    }
    return ok ? exit_ok : exit_verify;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Encrypted control with reduced GSW ciphers"};
    app.footer(csv_help);
    app.require_subcommand(1);

    KeygenArgs kg;
    auto* keygen = app.add_subcommand("keygen", "Generate a key pair and write a key file");
    keygen->add_option("--n", kg.n, "Lattice dimension")->capture_default_str();
    keygen->add_option("--m", kg.m, "Public key rows")->capture_default_str();
    keygen->add_option("--ell", kg.ell, "Word width, q = 2^ell")->capture_default_str();
    keygen->add_option("--mq", kg.m_q, "Q-format integer bits")->capture_default_str();
    keygen->add_option("--nq", kg.n_q, "Q-format fraction bits")->capture_default_str();
    keygen->add_option("--noise-bound", kg.noise_bound, "Noise bound B")->capture_default_str();
    keygen->add_option("--seed", kg.seed, "RNG seed")->capture_default_str();
    keygen->add_option("--out", kg.out, "Key file path")->required();

    BenchArgs bn;
    auto* bench = app.add_subcommand("bench", "Count word operations per homomorphic op");
    bench->add_option("--ops", bn.ops, "Comma-separated ops")->capture_default_str();
    bench->add_option("--ell-sweep", bn.ells, "Comma-separated word widths")->capture_default_str();
    bench->add_option("--repr", bn.repr, "full | reduced | both")
        ->check(CLI::IsMember({"full", "reduced", "both"}))
        ->capture_default_str();
    bench->add_option("--csv", bn.csv, "Output CSV (stdout when omitted)");
    bench->add_option("--seed", bn.seed, "RNG seed")->capture_default_str();

    SimulateArgs sm;
    auto* simulate = app.add_subcommand("simulate", "Run the closed loop");
    simulate->add_option("--config", sm.config, "key = value config file")->check(CLI::ExistingFile);
    simulate->add_option("--seed", sm.seed, "RNG seed");
    simulate->add_option("--duration", sm.duration, "Simulated seconds");
    simulate->add_option("--transport", sm.transport, "inprocess | socket")
        ->check(CLI::IsMember({"inprocess", "socket"}));
    simulate->add_option("--mode", sm.mode, "encrypted | fixed | float")
        ->check(CLI::IsMember({"encrypted", "fixed", "float"}));
    simulate->add_flag("--verify,!--no-verify", sm.verify, "Check every step against the fixed-point twin");
    simulate->add_option("--csv-out", sm.csv_out, "Trajectory CSV");
    simulate->add_option("--bench-out", sm.bench_out, "Per-step controller CSV");
    simulate->add_option("--gains-out", sm.gains_out, "Composite gain CSV");

    SelftestArgs st;
    auto* selftest = app.add_subcommand("selftest", "Run the equivalence suite");
    selftest->add_option("--seed", st.seed, "RNG seed")->capture_default_str();
    selftest->add_option("--trials", st.trials, "Trials per property")->capture_default_str();
    selftest->add_flag("--mutate-flatten", st.mutate, "Inject a Flatten fault (must fail)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*keygen)
            return cmd_keygen(kg);
        if (*bench)
            return cmd_bench(bn);
        if (*simulate)
            return cmd_simulate(sm, *simulate);
        if (*selftest)
            return cmd_selftest(st);
    } catch (const rcfhe::NoiseBudgetExceeded& e) {
        std::cerr << "verification failed: " << e.what() << "\n";
        return exit_verify;
    } catch (const IoFailure& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return exit_io;
    } catch (const rcfhe::ConfigIoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return exit_io;
    } catch (const rcfhe::ChannelClosed& e) {
        std::cerr << "channel closed: " << e.what() << "\n";
        return exit_io;
    } catch (const rcfhe::InvalidParams& e) {
        std::cerr << "invalid parameters: " << e.what() << "\n";
        return exit_usage;
    } catch (const rcfhe::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_usage;
}
