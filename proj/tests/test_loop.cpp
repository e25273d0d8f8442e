#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rcfhe/config.hpp"
#include "rcfhe/encrypted_loop.hpp"

using namespace rcfhe;

namespace {

LoopConfig short_run(LoopMode mode, double seconds)
{
    LoopConfig c;
    c.mode = mode;
    c.duration_s = seconds;
    c.seed = 3;
    return c;
}

double late_peak(const TraceLog& log, double after)
{
    double peak = 0;
    for (const auto& r : log.rows)
        if (r.t > after)
            peak = std::max({peak, std::abs(r.x.theta1), std::abs(r.x.theta2)});
    return peak;
}

}  // namespace

TEST_CASE("config parsing")
{
    std::istringstream in("# a comment\nseed = 42\n duration_s=2.5 \ntransport = socket\n"
                          "substeps = 50\nnoise_bound = 3\nverify = true  # trailing\nmode = fixed\n");
    const LoopConfig c = parse_config(in);
    CHECK(c.seed == 42);
    CHECK(c.duration_s == 2.5);
    CHECK(c.transport == Transport::Socket);
    CHECK(c.substeps == 50);
    CHECK(c.noise_bound == 3);
    CHECK(c.verify);
    CHECK(c.mode == LoopMode::Fixed);
    CHECK(c.steps() == 250);

    LoopConfig base;
    base.seed = 9;
    std::istringstream partial("duration_s = 1\n");
    const LoopConfig p = parse_config(partial, base);
    CHECK(p.seed == 9);
    CHECK(p.steps() == 100);

    const LoopConfig defaults;
    CHECK(defaults.steps() == 1000);
    CHECK(defaults.transport == Transport::InProcess);
    CHECK(defaults.substeps == 100);
    CHECK(defaults.noise_bound == 15);
}

TEST_CASE("config errors")
{
    for (const char* text : {"sample_rate = 5\n", "seed = -1\n", "seed = abc\n", "duration_s = 0\n",
                             "duration_s = 1x\n", "transport = udp\n", "substeps = 0\n",
                             "verify = maybe\n", "mode = quantum\n", "just words\n"}) {
        std::istringstream in(text);
        CHECK_THROWS_AS(parse_config(in), ConfigError);
    }
    CHECK_THROWS_AS(load_config("/nonexistent/loop.cfg"), ConfigIoError);
    CHECK(parse_transport("in-process") == Transport::InProcess);
    CHECK(parse_bool("off") == false);
}

TEST_CASE("run_closed_loop rejects empty runs")
{
    LoopConfig c;
    c.duration_s = 0.001;
    CHECK_THROWS_AS(run_closed_loop(c), std::invalid_argument);
    c.duration_s = 1;
    c.substeps = 0;
    CHECK_THROWS_AS(run_closed_loop(c), std::invalid_argument);
}

TEST_CASE("float and fixed loops stabilize the pendulum")
{
    const TraceLog f = run_closed_loop(short_run(LoopMode::Float, 10));
    REQUIRE(f.rows.size() == 1000);
    CHECK(f.rows.front().t == 0.0);
    CHECK(f.rows.back().t == doctest::Approx(9.99));
    CHECK(late_peak(f, 5.0) < 0.01);

    const TraceLog q = run_closed_loop(short_run(LoopMode::Fixed, 10));
    CHECK(late_peak(q, 5.0) < 0.01);
    CHECK(q.rows.front().x.theta1 == 0.0289);
    CHECK(q.controller.empty());
}

TEST_CASE("encrypted loop reproduces the fixed-point loop word for word")
{
    LoopConfig c = short_run(LoopMode::Encrypted, 0.3);
    c.verify = true;
    const TraceLog e = run_closed_loop(c);
    const TraceLog q = run_closed_loop(short_run(LoopMode::Fixed, 0.3));
    REQUIRE(e.rows.size() == 30);
    CHECK(same_words(e, q));
    CHECK(e.controller.size() == 30);
    for (const auto& s : e.controller)
        CHECK(s.counters.word_mults == 0);
    CHECK(e.max_noise > 0);
    CHECK(e.bytes_to_controller > e.bytes_to_adapter);
}

TEST_CASE("same seed, same run; transports agree")
{
    LoopConfig c = short_run(LoopMode::Encrypted, 0.1);
    const TraceLog a = run_closed_loop(c);
    const TraceLog b = run_closed_loop(c);
    CHECK(same_words(a, b));

    c.transport = Transport::Socket;
    const TraceLog s = run_closed_loop(c);
    CHECK(same_words(a, s));
    CHECK(s.bytes_to_controller == a.bytes_to_controller);
    CHECK(s.bytes_to_adapter == a.bytes_to_adapter);

    std::ostringstream ta, ts;
    write_trajectory_csv(ta, a);
    write_trajectory_csv(ts, s);
    CHECK(ta.str() == ts.str());
}

TEST_CASE("trace CSV layout")
{
    const TraceLog f = run_closed_loop(short_run(LoopMode::Float, 0.05));
    std::ostringstream os;
    write_trajectory_csv(os, f);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,theta1,dtheta1,theta2,dtheta2,T,u,xhat1,xhat2,xhat3,xhat4,xhat5,y1,y2");
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 13);
    }
    CHECK(rows == 5);

    LoopConfig c = short_run(LoopMode::Encrypted, 0.02);
    const TraceLog e = run_closed_loop(c);
    std::ostringstream b;
    write_step_bench_csv(b, e);
    CHECK(b.str().rfind("step,word_mults,word_adds,bit_ops,wall_ns\n0,0,", 0) == 0);
}
