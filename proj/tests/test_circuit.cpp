#include "doctest.h"

#include <cmath>
#include <random>

#include "dpsim/circuit.h"

using namespace dpsim;

namespace {

DramConfig quiet_config()
{
    auto c = default_config();
    c.variation.cell_noise_sigma = 0.0;
    return validate_config(c);
}

}  // namespace

TEST_CASE("charge sharing deviation")
{
    ElectricalParams e;
    CellState one{1.0, 22e-15};
    BitlinePair bl;
    double d = charge_share(one, bl, e);
    CHECK(d == doctest::Approx(0.5 / 11.0).epsilon(1e-12));
    CHECK(d * 1000 == doctest::Approx(45.45).epsilon(1e-3));
    CHECK(bl.v_bl == doctest::Approx(0.5 + d));
    CHECK(one.voltage == bl.v_bl);

    CellState armed{0.5, 22e-15};
    BitlinePair bl2;
    CHECK(charge_share(armed, bl2, e) == 0.0);

    CellState zero{0.0, 22e-15};
    BitlinePair bl3;
    CHECK(charge_share(zero, bl3, e) == -d);
}

TEST_CASE("charge sharing conserves charge")
{
    ElectricalParams e;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> v(0.0, 1.0), c(5e-15, 40e-15);
    for (int i = 0; i < 1000; ++i) {
        CellState cell{v(rng), c(rng)};
        BitlinePair bl;
        double before = cell.capacitance * cell.voltage + e.c_bitline() * bl.v_bl;
        charge_share(cell, bl, e);
        double after = (cell.capacitance + e.c_bitline()) * bl.v_bl;
        REQUIRE(std::abs(after - before) <= 4 * std::numeric_limits<double>::epsilon() * before);
    }
}

TEST_CASE("sense decisions")
{
    ElectricalParams e;
    BitlinePair bl;
    bl.v_bl = 0.545;
    bl.precharged = false;
    CHECK(sense(SenseAmpInstance{-0.001, true}, bl, e, 0.0) == 1);
    CHECK(bl.v_bl == 1.0);
    CHECK(bl.v_blbar == 0.0);

    BitlinePair mid;
    CHECK(sense(SenseAmpInstance{-1e-4, true}, mid, e, 0.0) == 0);
    CHECK(mid.v_bl == 0.0);
    BitlinePair mid2;
    CHECK(sense(SenseAmpInstance{+1e-4, true}, mid2, e, 0.0) == 1);
}

TEST_CASE("zero variation gives all-ones SA output")
{
    auto c = default_config();
    c.variation.variation_percent = 0.0;
    c.variation.cell_noise_sigma = 0.0;
    c = validate_config(c);
    VariationSampler s(c);
    for (std::uint32_t col = 0; col < 4096; ++col)
        REQUIRE(s.sa_offset(Address{0, 0, 0, 0, 0, col}) == c.variation.sa_offset_bias);
    Subarray sub(c, Address{}, 1, 4096);
    auto bits = sub.sense_disconnected();
    for (auto b : bits)
        REQUIRE(b == 1);
}

TEST_CASE("waveform orderings")
{
    for (auto k : {CommandKind::ACT, CommandKind::PRE, CommandKind::UE_SA, CommandKind::UE_SA_WRITEBACK,
                   CommandKind::UC_PLA, CommandKind::D_TRAN})
        CHECK(waveform_valid(waveform_of(k)));

    auto ue = waveform_of(CommandKind::UE_SA_WRITEBACK);
    REQUIRE(ue.events.size() >= 2);
    CHECK(ue.events[0].signal == Signal::SenseAmp);
    CHECK(ue.events[0].action == Action::Trigger);
    CHECK(ue.events[1].signal == Signal::Wordline);
    CHECK(ue.events[1].time_ns > ue.events[0].time_ns);

    auto uc = waveform_of(CommandKind::UC_PLA);
    CHECK(uc.events[0].signal == Signal::Wordline);
    CHECK(uc.events[1].signal == Signal::PrechargeLogic);
    CHECK(uc.events[0].time_ns == uc.events[1].time_ns);

    auto act = waveform_of(CommandKind::ACT);
    CHECK(act.events[0].signal == Signal::Wordline);
    CHECK(act.events[1].signal == Signal::SenseAmp);
    CHECK(act.events[1].time_ns > act.events[0].time_ns);

    auto csv = waveform_csv(ue);
    CHECK(csv.rfind("signal,action,time_ns\n", 0) == 0);
    CHECK_THROWS(command_from_string("FOO"));
    CHECK(command_from_string("UC_PLA") == CommandKind::UC_PLA);
}

TEST_CASE("precharge")
{
    auto c = quiet_config();
    Subarray sub(c, Address{}, 4, 64);
    sub.activate(0);
    CHECK_FALSE(sub.precharged());
    sub.precharge();
    for (auto& bl : sub.bitlines()) {
        CHECK(bl.precharged);
        CHECK(bl.v_bl == 0.5);
        CHECK(bl.v_blbar == 0.5);
    }
    CHECK_FALSE(sub.row_buffer().has_value());
    double e0 = sub.ledger().energy_nj;
    sub.precharge();
    CHECK(sub.precharged());
    CHECK(sub.ledger().energy_nj - e0 == doctest::Approx(17.2));
}

TEST_CASE("activation restore semantics")
{
    auto c = quiet_config();
    Subarray sub(c, Address{}, 4, 256);
    BitVector ones(256, 1);
    sub.write_row(1, ones);
    CHECK(sub.activate(1) == ones);
    CHECK_THROWS_AS(sub.activate(2), SimulationError);
    sub.precharge();

    BitVector pattern(256);
    for (int i = 0; i < 256; ++i)
        pattern[i] = (i * 7 + 3) % 5 < 2;
    sub.write_row(2, pattern);
    auto first = sub.activate(2);
    sub.precharge();
    auto second = sub.activate(2);
    CHECK(first == pattern);
    CHECK(second == first);
    CHECK(sub.ledger().latency_ns > 0);
}

TEST_CASE("armed cells decided by cell variation")
{
    auto c = quiet_config();
    Subarray sub(c, Address{}, 2, 4096);
    sub.write_row(0, BitVector(4096, 1));
    sub.arm_row(0);
    for (std::uint32_t i = 0; i < 4096; ++i)
        REQUIRE(sub.cell(0, i).voltage == 0.5);
    auto bits = sub.activate(0);
    const auto& s = sub.sampler();
    for (std::uint32_t i = 0; i < 4096; ++i) {
        double f = s.cell_offset(sub.cell_address(0, i)) +
                   c.variation.uc_pla_sa_weight * s.sa_offset(sub.cell_address(0, i));
        REQUIRE(bits[i] == (f > 0 ? 1 : 0));
    }
}

TEST_CASE("leak decay law")
{
    ElectricalParams e;
    CellState c{1.0, 22e-15};
    leak(c, 0.0, 30, 100, e);
    CHECK(c.voltage == 1.0);
    leak(c, 1e9, 30, 100, e);
    CHECK(c.voltage == doctest::Approx(0.5));

    // time to reach |V - 0.5| < eps scales by 2^5.5 between 30C and 85C
    double tau = 3600;
    double eps = 1e-3;
    double t30 = effective_tau(tau, 30) * std::log(0.5 / eps);
    double t85 = effective_tau(tau, 85) * std::log(0.5 / eps);
    CHECK(t30 / t85 == doctest::Approx(std::pow(2.0, 5.5)));

    double prev = 0.5;
    for (double t = 0; t < 1e5; t += 1000) {
        CellState x{1.0, 22e-15};
        leak(x, t, 30, tau, e);
        CHECK(x.voltage - 0.5 <= prev + 1e-15);
        prev = x.voltage - 0.5;
        CellState hot{1.0, 22e-15};
        leak(hot, t, 60, tau, e);
        CHECK(hot.voltage <= x.voltage);
    }
}

TEST_CASE("sense is deterministic at zero noise")
{
    auto c = quiet_config();
    Subarray a(c, Address{0, 0, 1, 0, 0, 0}, 1, 512);
    Subarray b(c, Address{0, 0, 1, 0, 0, 0}, 1, 512);
    b.set_trial(12345);
    CHECK(a.sense_disconnected() == b.sense_disconnected());
}
