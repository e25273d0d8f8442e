#include "rcfhe/encrypted_loop.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <ostream>
#include <sstream>
#include <thread>

#include "rcfhe/transport.hpp"

namespace rcfhe {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t elapsed_ns(Clock::time_point since)
{
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - since).count());
}

void write_ciphers(ByteWriter& w, std::span<const ReducedCipher> cts)
{
    for (const auto& ct : cts)
        write_reduced(w, ct);
}

std::vector<ReducedCipher> read_ciphers(ByteReader& r, std::size_t count, const Params& p)
{
    // Each cipher carries at least its 8-byte shape header.
    if (count > r.remaining() / 8)
        throw MalformedFrame("cipher count exceeds payload");
    std::vector<ReducedCipher> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(read_reduced(r, p));
    return out;
}

Word to_word(double v, const QFormat& fmt) { return q_encode(v, fmt); }

}  // namespace

Frame make_hello(const Params& p)
{
    ByteWriter w;
    write_params_block(w, p);
    return {MsgType::HelloParams, w.take()};
}

Params parse_hello(const Frame& f)
{
    if (f.type != MsgType::HelloParams)
        throw MalformedFrame("expected HELLO_PARAMS");
    ByteReader r(f.payload);
    Params p;
    try {
        p = read_params_block(r);
    } catch (const InvalidParams& e) {
        throw MalformedFrame(std::string("bad params block: ") + e.what());
    }
    if (!r.done())
        throw MalformedFrame("trailing bytes after params block");
    return p;
}

Frame make_gains_frame(std::span<const ReducedCipher> gains,
                       std::span<const ReducedCipher> initial_signals)
{
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(gains.size()));
    w.u32(static_cast<std::uint32_t>(initial_signals.size()));
    write_ciphers(w, gains);
    write_ciphers(w, initial_signals);
    return {MsgType::EncGains, w.take()};
}

Frame make_cipher_frame(MsgType type, std::span<const ReducedCipher> ciphers)
{
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(ciphers.size()));
    write_ciphers(w, ciphers);
    return {type, w.take()};
}

std::vector<ReducedCipher> parse_cipher_frame(const Frame& f, MsgType expected,
                                              const Params& params)
{
    if (f.type != expected)
        throw MalformedFrame(std::string("expected ") + to_string(expected) + ", got " +
                             to_string(f.type));
    ByteReader r(f.payload);
    const std::uint32_t count = r.u32();
    auto out = read_ciphers(r, count, params);
    if (!r.done())
        throw MalformedFrame("trailing bytes after ciphers");
    return out;
}

// Adapter ----------------------------------------------------------------------

Adapter::Adapter(const Params& params, const GainSet& gains, std::uint64_t seed, bool verify)
    : params_(params), gains_(gains), rng_(seed), keys_(keygen(params, rng_)), verify_(verify)
{
    if (gains.fmt.ell != params.ell || gains.fmt.n_q != params.n_q || gains.fmt.m_q != params.m_q)
        throw std::invalid_argument("gain format does not match the scheme parameters");
}

std::vector<Frame> Adapter::init_frames()
{
    std::vector<ReducedCipher> gains;
    gains.reserve(gain_count);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < signal_length; ++j)
            gains.push_back(encrypt(keys_.pub, gains_.xq(i, j), rng_));
    for (std::size_t j = 0; j < signal_length; ++j)
        gains.push_back(encrypt(keys_.pub, gains_.uq(0, j), rng_));

    std::vector<ReducedCipher> initial;
    for (Word w : xhat_)
        initial.push_back(encrypt(keys_.pub, w, rng_));
    initial.push_back(encrypt(keys_.pub, u_, rng_));

    return {make_hello(params_), make_gains_frame(gains, initial)};
}

Frame Adapter::signals_frame(const Vec2& y)
{
    const QFormat fmt = qformat_of(params_);
    y_ = {to_word(y[0], fmt), to_word(y[1], fmt)};

    std::vector<ReducedCipher> cts;
    if (!first_) {
        for (Word w : xhat_)
            cts.push_back(encrypt(keys_.pub, w, rng_));
        cts.push_back(encrypt(keys_.pub, u_, rng_));
    }
    for (Word w : y_)
        cts.push_back(encrypt(keys_.pub, w, rng_));
    first_ = false;

    if (verify_)
        twin_ = plain_controller_step(gains_, xhat_, u_, y_);
    return make_cipher_frame(MsgType::EncSignalsToCtrl, cts);
}

void Adapter::on_results(const Frame& f)
{
    const auto cts = parse_cipher_frame(f, MsgType::EncResultsToAdapter, params_);
    if (cts.size() != 6)
        throw MalformedFrame("expected 6 result ciphers");

    std::array<Word, 6> wide{};
    for (std::size_t i = 0; i < 6; ++i)
        wide[i] = decrypt(keys_.secret, cts[i]);

    if (verify_) {
        if (!twin_)
            throw std::logic_error("results arrived before any signals were sent");
        const std::uint64_t budget = std::uint64_t{1} << (params_.ell - 2);
        for (std::size_t i = 0; i < 6; ++i) {
            const Word expect = i < 5 ? twin_->xhat_wide[i] : twin_->u_wide;
            if (wide[i] != expect) {
                std::ostringstream os;
                os << "result " << i << " decrypted to " << wide[i] << ", fixed-point twin has "
                   << expect;
                throw NoiseBudgetExceeded(os.str());
            }
            const std::uint64_t noise = noise_of(keys_.secret, cts[i], expect);
            if (noise >= budget)
                throw NoiseBudgetExceeded("result noise " + std::to_string(noise) +
                                          " reached the decryption budget");
            max_noise_ = std::max(max_noise_, noise);
        }
    }

    for (std::size_t i = 0; i < 5; ++i)
        xhat_[i] = rescale(wide[i], params_.n_q, params_.ell);
    u_ = rescale(wide[5], params_.n_q, params_.ell);
}

double Adapter::u_value() const { return q_decode(u_, params_.n_q, params_.ell); }

Vec5 Adapter::xhat_value() const
{
    Vec5 v;
    for (int i = 0; i < 5; ++i)
        v[i] = q_decode(xhat_[static_cast<std::size_t>(i)], params_.n_q, params_.ell);
    return v;
}

// Controller -------------------------------------------------------------------

std::optional<Frame> Controller::handle(const Frame& f)
{
    if (finished_)
        throw MalformedFrame("frame after SHUTDOWN");
    switch (f.type) {
    case MsgType::HelloParams:
        params_ = parse_hello(f);
        return std::nullopt;
    case MsgType::EncGains:
        on_gains(f);
        return std::nullopt;
    case MsgType::EncSignalsToCtrl:
        return step(f);
    case MsgType::Shutdown:
        if (!f.payload.empty())
            throw MalformedFrame("SHUTDOWN carries no payload");
        finished_ = true;
        return std::nullopt;
    case MsgType::EncResultsToAdapter:
        break;
    }
    throw MalformedFrame(std::string("controller cannot accept ") + to_string(f.type));
}

void Controller::on_gains(const Frame& f)
{
    if (!params_)
        throw MalformedFrame("ENC_GAINS before HELLO_PARAMS");
    ByteReader r(f.payload);
    const std::uint32_t gains = r.u32();
    const std::uint32_t signals = r.u32();
    if (gains != gain_count || signals != 6)
        throw MalformedFrame("ENC_GAINS must hold 48 gains and 6 initial signals");
    const auto cts = read_ciphers(r, gains + signals, *params_);
    if (!r.done())
        throw MalformedFrame("trailing bytes after ENC_GAINS");

    x_gains_ = Grid<Cipher>(5, signal_length);
    u_gains_ = Grid<Cipher>(1, signal_length);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < signal_length; ++j)
            x_gains_.at(i, j) = to_full(cts[i * signal_length + j]);
    for (std::size_t j = 0; j < signal_length; ++j)
        u_gains_.at(0, j) = to_full(cts[5 * signal_length + j]);

    signals_.assign(cts.begin() + gain_count, cts.end());
    signals_.resize(signal_length);
}

Frame Controller::step(const Frame& f)
{
    if (x_gains_.cells.empty())
        throw MalformedFrame("ENC_SIGNALS_TO_CTRL before ENC_GAINS");
    auto cts = parse_cipher_frame(f, MsgType::EncSignalsToCtrl, *params_);
    if (cts.size() == 2 && stats_.empty()) {
        signals_[6] = std::move(cts[0]);
        signals_[7] = std::move(cts[1]);
    } else if (cts.size() == signal_length) {
        signals_ = std::move(cts);
    } else {
        throw MalformedFrame("unexpected signal count " + std::to_string(cts.size()));
    }

    const auto start = Clock::now();
    CounterScope scope;
    auto out = enc_mat_vec(x_gains_, signals_);
    auto u = enc_mat_vec(u_gains_, signals_);
    out.push_back(std::move(u[0]));
    Frame reply = make_cipher_frame(MsgType::EncResultsToAdapter, out);
    stats_.push_back({scope.counters(), elapsed_ns(start)});
    return reply;
}

void serve_controller(Controller& c, Endpoint& ep)
{
    while (!c.finished()) {
        const Frame f = ep.receive();
        if (auto reply = c.handle(f))
            ep.send(*reply);
    }
}

// Closed loop ------------------------------------------------------------------

const char* to_string(Transport t) { return t == Transport::Socket ? "socket" : "inprocess"; }

const char* to_string(LoopMode m)
{
    switch (m) {
    case LoopMode::Encrypted:
        return "encrypted";
    case LoopMode::Fixed:
        return "fixed";
    case LoopMode::Float:
        return "float";
    }
    return "unknown";
}

int LoopConfig::steps() const
{
    return static_cast<int>(std::llround(duration_s / sample_period));
}

GainSet loop_gains(const LoopConfig& cfg, const Params& params)
{
    const ControllerDesign d = design_controller(cfg.plant, sample_period, cfg.x0);
    return composite_gains(d.model, d.L, d.K, qformat_of(params));
}

namespace {

TraceRow make_row(int k, const PlantState& x, const Vec2& y)
{
    TraceRow row;
    row.k = k;
    row.t = k * sample_period;
    row.x = x;
    row.y = y;
    return row;
}

void fill_words(TraceRow& row, const std::array<Word, 5>& xhat, Word u,
                const std::array<Word, 2>& y, const Params& p)
{
    row.xhat_words = xhat;
    row.u_word = u;
    row.y_words = y;
    for (int i = 0; i < 5; ++i)
        row.xhat[i] = q_decode(xhat[static_cast<std::size_t>(i)], p.n_q, p.ell);
    row.u = q_decode(u, p.n_q, p.ell);
}

void run_float(const LoopConfig& cfg, const GainSet& g, TraceLog& log)
{
    PlantState x = PlantState::from(cfg.x0);
    Vec5 xhat = Vec5::Zero();
    double u = 0;
    for (int k = 0; k < cfg.steps(); ++k) {
        const Vec2 y = measure(x);
        TraceRow row = make_row(k, x, y);
        row.xhat = xhat;
        row.u = u;
        log.rows.push_back(row);
        const FloatStep next = float_composite_step(g, xhat, u, y);
        x = advance_sample(x, u, sample_period, cfg.substeps, cfg.plant);
        xhat = next.xhat;
        u = next.u;
    }
}

void run_fixed(const LoopConfig& cfg, const Params& p, const GainSet& g, TraceLog& log)
{
    const QFormat fmt = qformat_of(p);
    PlantState x = PlantState::from(cfg.x0);
    std::array<Word, 5> xhat{};
    Word u = 0;
    for (int k = 0; k < cfg.steps(); ++k) {
        const Vec2 y = measure(x);
        const std::array<Word, 2> yw{to_word(y[0], fmt), to_word(y[1], fmt)};
        TraceRow row = make_row(k, x, y);
        fill_words(row, xhat, u, yw, p);
        log.rows.push_back(row);
        const PlainStep next = plain_controller_step(g, xhat, u, yw);
        x = advance_sample(x, row.u, sample_period, cfg.substeps, cfg.plant);
        xhat = next.xhat;
        u = next.u;
    }
}

class AdapterSide {
public:
    virtual ~AdapterSide() = default;
    virtual void send(const Frame& f) = 0;
    virtual Frame receive() = 0;
};

void drive_adapter(const LoopConfig& cfg, const Params& p, const GainSet& g, AdapterSide& link,
                   TraceLog& log)
{
    Adapter adapter(p, g, cfg.seed, cfg.verify);
    for (const Frame& f : adapter.init_frames())
        link.send(f);

    PlantState x = PlantState::from(cfg.x0);
    for (int k = 0; k < cfg.steps(); ++k) {
        const Vec2 y = measure(x);
        link.send(adapter.signals_frame(y));
        TraceRow row = make_row(k, x, y);
        fill_words(row, adapter.xhat_words(), adapter.u_word(), adapter.y_words(), p);
        log.rows.push_back(row);

        const Frame results = link.receive();
        x = advance_sample(x, row.u, sample_period, cfg.substeps, cfg.plant);
        adapter.on_results(results);
    }
    link.send(Frame{MsgType::Shutdown, {}});
    log.max_noise = adapter.max_noise();
}

struct InProcessLink : AdapterSide {
    Endpoint& adapter;
    Endpoint& controller_ep;
    Controller& controller;

    InProcessLink(Endpoint& a, Endpoint& c, Controller& ctrl)
        : adapter(a), controller_ep(c), controller(ctrl)
    {
    }

    void send(const Frame& f) override
    {
        adapter.send(f);
        if (auto reply = controller.handle(controller_ep.receive()))
            controller_ep.send(*reply);
    }
    Frame receive() override { return adapter.receive(); }
};

struct RemoteLink : AdapterSide {
    Endpoint& ep;
    explicit RemoteLink(Endpoint& e) : ep(e) {}
    void send(const Frame& f) override { ep.send(f); }
    Frame receive() override { return ep.receive(); }
};

void run_encrypted(const LoopConfig& cfg, const Params& p, const GainSet& g, TraceLog& log)
{
    Controller controller;
    if (cfg.transport == Transport::InProcess) {
        auto [a, c] = make_in_process_pair();
        InProcessLink link(*a, *c, controller);
        drive_adapter(cfg, p, g, link, log);
        log.bytes_to_controller = a->bytes_sent();
        log.bytes_to_adapter = c->bytes_sent();
    } else {
        SocketListener listener;
        std::exception_ptr controller_error;
        std::uint64_t controller_bytes = 0;
        std::thread remote([&] {
            try {
                auto ep = listener.accept();
                serve_controller(controller, *ep);
                controller_bytes = ep->bytes_sent();
            } catch (...) {
                controller_error = std::current_exception();
            }
        });

        std::exception_ptr adapter_error;
        std::uint64_t adapter_bytes = 0;
        try {
            auto ep = connect_local(listener.port());
            RemoteLink link(*ep);
            try {
                drive_adapter(cfg, p, g, link, log);
            } catch (...) {
                ep->close();
                throw;
            }
            adapter_bytes = ep->bytes_sent();
        } catch (...) {
            adapter_error = std::current_exception();
            listener.close();
        }
        remote.join();

        // A controller failure shows up on the adapter as a closed channel;
        // report the original cause.
        if (controller_error) {
            bool adapter_saw_close = false;
            if (adapter_error) {
                try {
                    std::rethrow_exception(adapter_error);
                } catch (const ChannelClosed&) {
                    adapter_saw_close = true;
                } catch (...) {
                }
            }
            if (!adapter_error || adapter_saw_close)
                std::rethrow_exception(controller_error);
        }
        if (adapter_error)
            std::rethrow_exception(adapter_error);
        log.bytes_to_controller = adapter_bytes;
        log.bytes_to_adapter = controller_bytes;
    }
    log.controller = controller.stats();
}

}  // namespace

TraceLog run_closed_loop(const LoopConfig& cfg)
{
    if (cfg.duration_s <= 0 || cfg.steps() < 1)
        throw std::invalid_argument("duration must cover at least one sample");
    if (cfg.substeps < 1)
        throw std::invalid_argument("substeps must be >= 1");

    const auto start = Clock::now();
    const Params p = make_params(7, 7, 64, 10, 22, cfg.noise_bound);
    const GainSet g = loop_gains(cfg, p);

    TraceLog log;
    log.config = cfg;
    log.rows.reserve(static_cast<std::size_t>(cfg.steps()));
    switch (cfg.mode) {
    case LoopMode::Float:
        run_float(cfg, g, log);
        break;
    case LoopMode::Fixed:
        run_fixed(cfg, p, g, log);
        break;
    case LoopMode::Encrypted:
        run_encrypted(cfg, p, g, log);
        break;
    }
    log.total_ns = elapsed_ns(start);
    return log;
}

void write_trajectory_csv(std::ostream& os, const TraceLog& log)
{
    os << "t,theta1,dtheta1,theta2,dtheta2,T,u,xhat1,xhat2,xhat3,xhat4,xhat5,y1,y2\n";
    const auto old = os.precision(17);
    for (const auto& r : log.rows) {
        os << r.t << ',' << r.x.theta1 << ',' << r.x.dtheta1 << ',' << r.x.theta2 << ','
           << r.x.dtheta2 << ',' << r.x.torque << ',' << r.u;
        for (int i = 0; i < 5; ++i)
            os << ',' << r.xhat[i];
        os << ',' << r.y[0] << ',' << r.y[1] << '\n';
    }
    os.precision(old);
}

void write_step_bench_csv(std::ostream& os, const TraceLog& log)
{
    os << "step,word_mults,word_adds,bit_ops,wall_ns\n";
    for (std::size_t i = 0; i < log.controller.size(); ++i) {
        const auto& s = log.controller[i];
        os << i << ',' << s.counters.word_mults << ',' << s.counters.word_adds << ','
           << s.counters.bit_ops << ',' << s.wall_ns << '\n';
    }
}

bool same_words(const TraceLog& a, const TraceLog& b)
{
    if (a.rows.size() != b.rows.size())
        return false;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        const auto& x = a.rows[i];
        const auto& y = b.rows[i];
        if (x.xhat_words != y.xhat_words || x.u_word != y.u_word || x.y_words != y.y_words ||
            !(x.x == y.x))
            return false;
    }
    return true;
}

}  // namespace rcfhe
