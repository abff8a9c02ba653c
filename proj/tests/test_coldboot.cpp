#include "doctest.h"

#include <random>

#include "dpsim/coldboot.h"
#include "dpsim/fsm.h"

using namespace dpsim;

namespace {

DramConfig ddr3(std::uint64_t mb) { return validate_config(make_profile("DDR3-1600", mb << 20)); }

}  // namespace

TEST_CASE("self-refresh destruction takes one refresh window")
{
    for (std::uint64_t mb : {64u, 1024u, 16384u}) {
        CHECK(schedule_destruction(ddr3(mb), Mechanism::SELF_SR).latency_s == 0.064);
        CHECK(schedule_destruction(validate_config(make_profile("LPDDR4-3200", mb << 20)), Mechanism::SELF_SR)
                  .latency_s == 0.032);
    }
    CHECK(schedule_destruction(ddr3(64), Mechanism::SELF_SR).commands == 0);
    CHECK(schedule_destruction(ddr3(64), Mechanism::SELF_BURST).commands == 0);
}

TEST_CASE("burst anchor")
{
    auto c = validate_config(make_profile("DDR4-2400", 4ull << 30));
    double t = schedule_destruction(c, Mechanism::SELF_BURST).latency_s;
    CHECK(t == doctest::Approx(0.009).epsilon(1e-9).scale(0));
    // linear in rows
    auto h = validate_config(make_profile("DDR4-2400", 2ull << 30));
    CHECK(schedule_destruction(h, Mechanism::SELF_BURST).latency_s == doctest::Approx(t / 2).scale(0));
}

TEST_CASE("serial mechanisms")
{
    auto c = ddr3(64);
    const double rows = double(c.geometry.total_rows());
    CHECK(schedule_destruction(c, Mechanism::TCG_SOFTWARE).latency_s == doctest::Approx(rows * 546e-9).scale(0));
    CHECK(schedule_destruction(c, Mechanism::CMD_BASELINE).latency_s == doctest::Approx(rows * 546e-9).scale(0));
}

TEST_CASE("interleaved schedule hits the tFAW bound")
{
    auto c = ddr3(64);
    const double rows = double(c.geometry.total_rows());
    // 4 row-ops per 30 ns window; UE/UC use one row-op, Rowclone two
    auto ue = schedule_destruction(c, Mechanism::CMD_DATAPLANT_UE);
    auto uc = schedule_destruction(c, Mechanism::CMD_DATAPLANT_UC);
    auto rc = schedule_destruction(c, Mechanism::CMD_ROWCLONE);
    CHECK(ue.latency_s == doctest::Approx(rows * 7.5e-9).epsilon(1e-3).scale(0));
    CHECK(uc.latency_s == doctest::Approx(ue.latency_s).epsilon(1e-3).scale(0));
    CHECK(rc.latency_s == doctest::Approx(rows * 15e-9).epsilon(1e-3).scale(0));
    double ratio = rc.latency_s / ue.latency_s;
    CHECK(ratio >= 1.2);
    CHECK(ratio <= 2.6);
}

TEST_CASE("latency lower bound")
{
    for (auto m : all_mechanisms()) {
        if (is_self(m))
            continue;
        auto c = ddr3(128);
        auto r = schedule_destruction(c, m);
        auto mc = mechanism_cost(c, m);
        double par = mc.bus_serial ? 1.0 : double(c.geometry.total_banks());
        CHECK(r.latency_s * 1e9 >= double(r.rows) * mc.row_latency_ns / par - 1e-6);
    }
}

TEST_CASE("mechanism ordering carries over to totals")
{
    auto c = ddr3(256);
    auto t = [&](Mechanism m) { return schedule_destruction(c, m).latency_s; };
    CHECK(t(Mechanism::CMD_DATAPLANT_UC) <= t(Mechanism::CMD_DATAPLANT_UE));
    CHECK(t(Mechanism::CMD_DATAPLANT_UE) < t(Mechanism::CMD_ROWCLONE));
    CHECK(t(Mechanism::CMD_ROWCLONE) < t(Mechanism::CMD_LISA));
    CHECK(t(Mechanism::CMD_LISA) < t(Mechanism::CMD_BASELINE));
}

TEST_CASE("latency grows with capacity for command mechanisms")
{
    auto tab = compare_mechanisms(ddr3(64), {64ull << 20, 128ull << 20, 256ull << 20, 1ull << 30});
    CHECK(tab.reports.size() == 4 * all_mechanisms().size());
    for (auto m : all_mechanisms()) {
        double prev = 0;
        for (std::uint64_t cap : {64ull << 20, 128ull << 20, 256ull << 20, 1ull << 30}) {
            double l = tab.at(cap, m).latency_s;
            if (m == Mechanism::SELF_SR)
                CHECK(l == 0.064);
            else
                CHECK(l > prev);
            prev = l;
        }
    }
}

TEST_CASE("trace legality over random configs")
{
    std::mt19937_64 rng(42);
    const char* profiles[] = {"DDR3-1600", "DDR4-2400", "LPDDR4-3200"};
    const Mechanism cmd[] = {Mechanism::CMD_BASELINE, Mechanism::CMD_LISA, Mechanism::CMD_ROWCLONE,
                             Mechanism::CMD_DATAPLANT_UE, Mechanism::CMD_DATAPLANT_UC};
    for (int i = 0; i < 100; ++i) {
        auto c = make_profile(profiles[rng() % 3], 64ull << 20);
        c.timing.tRRD = 2.0 + double(rng() % 80) / 10.0;
        c.timing.tFAW = 10.0 + double(rng() % 400) / 10.0;
        c.geometry.banks_per_rank = 1u << (rng() % 5);
        c.geometry.subarrays_per_bank = 1;
        c.declared_capacity.reset();
        c = validate_config(c);
        auto m = cmd[rng() % 5];
        auto r = schedule_destruction(c, m, true);
        auto mc = mechanism_cost(c, m);
        CHECK(r.trace.size() == r.rows * std::uint64_t(mc.row_ops));
        auto chk = validate_trace(r.trace, power_constraints(c), 0.0);
        CHECK(chk.ok);
        CHECK(chk.trrd_violations == 0);
        CHECK(chk.tfaw_violations == 0);
    }
}

TEST_CASE("validator catches violations")
{
    PowerConstraints pc{6.0, 30.0, 8};
    std::vector<TraceEvent> ok{{0, 0, 0}, {6, 1, 1}, {12, 2, 2}, {18, 3, 3}, {30, 4, 4}};
    CHECK(validate_trace(ok, pc, 0).ok);
    auto tight = ok;
    tight[1].time_ns = 5;
    auto a = validate_trace(tight, pc, 0);
    CHECK_FALSE(a.ok);
    CHECK(a.trrd_violations == 1);
    auto faw = ok;
    faw[4].time_ns = 29;
    auto b = validate_trace(faw, pc, 0);
    CHECK_FALSE(b.ok);
    CHECK(b.tfaw_violations == 1);
}

TEST_CASE("energy")
{
    auto c = ddr3(64);
    const double rows = double(c.geometry.total_rows());
    CHECK(destruction_energy(c, Mechanism::TCG_SOFTWARE) == doctest::Approx(rows * 2000e-9).scale(0));
    CHECK(destruction_energy(c, Mechanism::CMD_DATAPLANT_UC) == doctest::Approx(rows * 17.2e-9).scale(0));
    CHECK(destruction_energy(c, Mechanism::SELF_SR) == doctest::Approx(rows * 17.3e-9).scale(0));
    double tcg = destruction_energy(c, Mechanism::TCG_SOFTWARE);
    CHECK(tcg / destruction_energy(c, Mechanism::CMD_LISA) == doctest::Approx(25).epsilon(0.2).scale(0));
    CHECK(tcg / destruction_energy(c, Mechanism::CMD_ROWCLONE) == doctest::Approx(45).epsilon(0.2).scale(0));
    CHECK(tcg / destruction_energy(c, Mechanism::SELF_BURST) == doctest::Approx(114).epsilon(0.2).scale(0));
    CHECK(std::round(c.energy.baseline_write / c.energy.uc_pla) == 116);

    // linearity
    auto d = ddr3(128);
    for (auto m : all_mechanisms())
        CHECK(destruction_energy(d, m) == doctest::Approx(2 * destruction_energy(c, m)).epsilon(1e-12).scale(0));

    // bus energy applies to command mechanisms only
    auto b = c;
    b.energy.bus_energy_per_command = 1.0;
    b = validate_config(b);
    CHECK(destruction_energy(b, Mechanism::SELF_BURST) == destruction_energy(c, Mechanism::SELF_BURST));
    CHECK(destruction_energy(b, Mechanism::CMD_ROWCLONE) > destruction_energy(c, Mechanism::CMD_ROWCLONE));
    auto rc = schedule_destruction(b, Mechanism::CMD_ROWCLONE);
    CHECK(rc.energy_j == doctest::Approx(rows * 50e-9 + double(rc.commands) * 1e-9).scale(0));
}

TEST_CASE("mechanism names")
{
    for (auto m : all_mechanisms())
        CHECK(mechanism_from_string(to_string(m)) == m);
    CHECK_THROWS(mechanism_from_string("CMD_MAGIC"));
    CHECK(all_mechanisms().size() == 8);
}

TEST_CASE("dealloc cost")
{
    auto c = ddr3(64);
    auto ue = dealloc_cost(c, 8192, DeallocMechanism::UeSa);
    CHECK(ue.latency_ns == 35.0);
    CHECK(ue.energy_nj == doctest::Approx(17.3));
    auto sw = dealloc_cost(c, 8192, DeallocMechanism::Software);
    CHECK(sw.latency_ns == 546.0);
    CHECK(sw.energy_nj == 2000.0);
    for (auto m : all_dealloc_mechanisms()) {
        auto a = dealloc_cost(c, 8192, m), b = dealloc_cost(c, 16384, m);
        CHECK(b.latency_ns == 2 * a.latency_ns);
        CHECK(b.energy_nj == 2 * a.energy_nj);
    }
    CHECK(dealloc_cost(c, 1, DeallocMechanism::UcPla).rows == 1);
    CHECK(dealloc_cost(c, 8193, DeallocMechanism::UcPla).rows == 2);
    CHECK_THROWS(dealloc_cost(c, 0, DeallocMechanism::UcPla));
}

TEST_CASE("overhead table is static")
{
    auto& t = overhead_table();
    REQUIRE(t.size() == 3);
    CHECK(t[1].chacha8 == "17%");
    CHECK(t[1].aes128 == "12%");
    CHECK(t[2].self_destruction == "~0%");
}

// ---------------------------------------------------------------------------
// FSM

TEST_CASE("fsm basic transitions")
{
    DramFsm f;
    f.rows_total = 3;
    auto s = fsm_step(f, {FsmEventKind::power_on});
    CHECK(s.accepted);
    CHECK(s.fsm.state == FsmState::DESTRUCTION_IN_PROGRESS);
    auto rd = fsm_step(s.fsm, {FsmEventKind::external_command, ExtCommand::READ});
    CHECK_FALSE(rd.accepted);
    CHECK(rd.fsm == s.fsm);
    // second power_on is idempotent
    auto again = fsm_step(s.fsm, {FsmEventKind::power_on});
    CHECK(again.fsm == s.fsm);
    // completing early is refused
    CHECK_FALSE(fsm_step(s.fsm, {FsmEventKind::destruction_complete}).accepted);
    auto g = s.fsm;
    for (int i = 0; i < 3; ++i)
        g = fsm_step(g, {FsmEventKind::destruction_tick}).fsm;
    CHECK(g.progress == 3);
    auto r = fsm_step(g, {FsmEventKind::destruction_complete});
    CHECK(r.accepted);
    CHECK(r.fsm.state == FsmState::READY);
    for (int k = 0; k < kExtCommands; ++k)
        CHECK(fsm_step(r.fsm, {FsmEventKind::external_command, ExtCommand(k)}).accepted);
    auto off = fsm_step(r.fsm, {FsmEventKind::power_off});
    CHECK(off.fsm.state == FsmState::POWERED_OFF);
    CHECK(off.fsm.progress == 0);
}

TEST_CASE("command-based variant accepts only the destruction sequence")
{
    DramFsm f;
    f.variant = FsmVariant::command_based;
    f.rows_total = 2;
    f = fsm_step(f, {FsmEventKind::power_on}).fsm;
    for (int k = 0; k < kExtCommands; ++k) {
        auto c = ExtCommand(k);
        CHECK(fsm_step(f, {FsmEventKind::external_command, c}).accepted == (c == ExtCommand::DESTROY_ROW));
    }
    CHECK_FALSE(fsm_step(f, {FsmEventKind::destruction_tick}).accepted);
    f = fsm_step(f, {FsmEventKind::external_command, ExtCommand::DESTROY_ROW}).fsm;
    f = fsm_step(f, {FsmEventKind::external_command, ExtCommand::DESTROY_ROW}).fsm;
    CHECK(f.progress == 2);
    CHECK_FALSE(fsm_step(f, {FsmEventKind::external_command, ExtCommand::DESTROY_ROW}).accepted);
    f = fsm_step(f, {FsmEventKind::destruction_complete}).fsm;
    CHECK(f.state == FsmState::READY);
}

TEST_CASE("fsm safety by exhaustive enumeration")
{
    const auto n = fsm_alphabet().size();
    for (auto v : {FsmVariant::self_destruct, FsmVariant::command_based}) {
        for (std::uint64_t rows : {1u, 2u, 3u}) {
            auto fast = check_fsm_safety(v, rows, 6);
            auto slow = check_fsm_safety_bruteforce(v, rows, 6);
            CHECK(fast.sequences == slow.sequences);
            CHECK(fast.violations == slow.violations);
            auto r = check_fsm_safety(v, rows, 12);
            std::uint64_t expect = 0, p = 1;
            for (int k = 1; k <= 12; ++k)
                expect += (p *= n);
            CHECK(r.sequences == expect);
            CHECK(r.violations == 0);
        }
    }
}

namespace {

// Lets WRITE through while destruction is still running.
FsmStep leaky_step(const DramFsm& f, const FsmEvent& e)
{
    if (f.state == FsmState::DESTRUCTION_IN_PROGRESS && e.kind == FsmEventKind::external_command &&
        e.command == ExtCommand::WRITE)
        return {f, true};
    return fsm_step(f, e);
}

// Skips the progress check on completion.
FsmStep hasty_step(const DramFsm& f, const FsmEvent& e)
{
    if (f.state == FsmState::DESTRUCTION_IN_PROGRESS && e.kind == FsmEventKind::destruction_complete) {
        DramFsm g = f;
        g.state = FsmState::READY;
        return {g, true};
    }
    return fsm_step(f, e);
}

}  // namespace

TEST_CASE("model check finds planted bugs")
{
    auto a = check_fsm_safety(FsmVariant::self_destruct, 2, 12, leaky_step);
    CHECK(a.violations > 0);
    REQUIRE(a.counterexample.size() == 2);
    CHECK(a.counterexample[0].kind == FsmEventKind::power_on);
    CHECK(a.counterexample[1].command == ExtCommand::WRITE);
    auto b = check_fsm_safety(FsmVariant::self_destruct, 2, 4, hasty_step);
    CHECK(b.violations > 0);
    CHECK(b.violations == check_fsm_safety_bruteforce(FsmVariant::self_destruct, 2, 4, hasty_step).violations);
}
