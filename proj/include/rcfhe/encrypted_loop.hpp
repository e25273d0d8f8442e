#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcfhe/control.hpp"
#include "rcfhe/counters.hpp"
#include "rcfhe/frame.hpp"
#include "rcfhe/gsw.hpp"
#include "rcfhe/hom_ops.hpp"
#include "rcfhe/keys.hpp"
#include "rcfhe/pendulum.hpp"
#include "rcfhe/rng.hpp"

namespace rcfhe {

class NoiseBudgetExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double sample_period = 0.01;

// Payloads ---------------------------------------------------------------------

Frame make_hello(const Params& p);
Params parse_hello(const Frame& f);

/// ENC_GAINS: u32 gain count, u32 signal count, gains row-major over
/// [F_A F_B F_L] then [K_A K_B K_L], then the initial E(xhat), E(u).
Frame make_gains_frame(std::span<const ReducedCipher> gains,
                       std::span<const ReducedCipher> initial_signals);

/// ENC_SIGNALS_TO_CTRL / ENC_RESULTS_TO_ADAPTER: u32 count, then ciphers.
Frame make_cipher_frame(MsgType type, std::span<const ReducedCipher> ciphers);
std::vector<ReducedCipher> parse_cipher_frame(const Frame& f, MsgType expected,
                                              const Params& params);

// Adapter (plant side, holds the keys) -----------------------------------------

class Adapter {
public:
    /// Generates keys from `seed`; the same stream then drives every encryption.
    Adapter(const Params& params, const GainSet& gains, std::uint64_t seed, bool verify);

    /// HELLO_PARAMS and ENC_GAINS.
    std::vector<Frame> init_frames();

    /// Encrypts y (and, after the first tick, the current xhat and u) for the
    /// controller.
    Frame signals_frame(const Vec2& y);

    /// Decrypts E(xhat+), E(u+), rescales and stores them. In verify mode the
    /// decrypted wide words are checked against the fixed-point twin.
    void on_results(const Frame& f);

    const std::array<Word, 5>& xhat_words() const { return xhat_; }
    Word u_word() const { return u_; }
    const std::array<Word, 2>& y_words() const { return y_; }
    double u_value() const;
    Vec5 xhat_value() const;

    const KeyPair& keys() const { return keys_; }
    const Params& params() const { return params_; }
    /// Largest noise seen on a controller result (verify mode only).
    std::uint64_t max_noise() const { return max_noise_; }

private:
    Params params_;
    GainSet gains_;
    Rng rng_;
    KeyPair keys_;
    bool verify_;
    bool first_ = true;
    std::array<Word, 5> xhat_{};
    Word u_ = 0;
    std::array<Word, 2> y_{};
    std::optional<PlainStep> twin_;
    std::uint64_t max_noise_ = 0;
};

// Controller (remote side, ciphers only) ---------------------------------------

struct ControllerStepStats {
    OpCounters counters;
    std::uint64_t wall_ns = 0;
};

class Controller {
public:
    /// Returns the reply, if the frame calls for one.
    std::optional<Frame> handle(const Frame& f);

    bool finished() const { return finished_; }
    const std::vector<ControllerStepStats>& stats() const { return stats_; }
    const Grid<Cipher>& x_gains() const { return x_gains_; }
    const Grid<Cipher>& u_gains() const { return u_gains_; }

private:
    void on_gains(const Frame& f);
    Frame step(const Frame& f);

    std::optional<Params> params_;
    Grid<Cipher> x_gains_;  // 5 x 8
    Grid<Cipher> u_gains_;  // 1 x 8
    std::vector<ReducedCipher> signals_;  // xhat(5), u, y(2)
    bool finished_ = false;
    std::vector<ControllerStepStats> stats_;
};

class Endpoint;

/// Receives and answers frames until SHUTDOWN.
void serve_controller(Controller& c, Endpoint& ep);

// Closed loop -----------------------------------------------------------------

enum class Transport { InProcess, Socket };
enum class LoopMode { Encrypted, Fixed, Float };

const char* to_string(Transport t);
const char* to_string(LoopMode m);

struct LoopConfig {
    std::uint64_t seed = 1;
    double duration_s = 10.0;
    Transport transport = Transport::InProcess;
    int substeps = 100;
    std::uint32_t noise_bound = 15;
    bool verify = false;
    LoopMode mode = LoopMode::Encrypted;
    Vec5 x0 = Vec5(0.0289, 0.0669, 0.1156, 0.0049, 0.0);
    PlantParams plant{};

    int steps() const;
};

/// t is the sample instant; state, y, xhat and u are the values at it, with u
/// the input held over the following period.
struct TraceRow {
    int k = 0;
    double t = 0;
    PlantState x;
    Vec2 y;
    Vec5 xhat;
    double u = 0;
    std::array<Word, 5> xhat_words{};
    Word u_word = 0;
    std::array<Word, 2> y_words{};
};

struct TraceLog {
    LoopConfig config;
    std::vector<TraceRow> rows;
    std::vector<ControllerStepStats> controller;
    std::uint64_t max_noise = 0;
    std::uint64_t bytes_to_controller = 0;
    std::uint64_t bytes_to_adapter = 0;
    std::uint64_t total_ns = 0;
};

/// Gains from the design for this configuration's plant and initial state.
GainSet loop_gains(const LoopConfig& cfg, const Params& params);

TraceLog run_closed_loop(const LoopConfig& cfg);

/// t,theta1,dtheta1,theta2,dtheta2,T,u,xhat1..xhat5,y1,y2
void write_trajectory_csv(std::ostream& os, const TraceLog& log);

/// step,word_mults,word_adds,bit_ops,wall_ns for each controller step.
void write_step_bench_csv(std::ostream& os, const TraceLog& log);

/// Word-level identity of two traces (every logged word).
bool same_words(const TraceLog& a, const TraceLog& b);

}  // namespace rcfhe
