#include "dpsim/fsm.h"

#include <deque>
#include <functional>
#include <map>
#include <tuple>

namespace dpsim {

std::string to_string(FsmState s)
{
    switch (s) {
    case FsmState::POWERED_OFF: return "POWERED_OFF";
    case FsmState::DESTRUCTION_IN_PROGRESS: return "DESTRUCTION_IN_PROGRESS";
    case FsmState::READY: return "READY";
    }
    return "?";
}

std::string to_string(FsmEventKind k)
{
    switch (k) {
    case FsmEventKind::power_on: return "power_on";
    case FsmEventKind::power_off: return "power_off";
    case FsmEventKind::external_command: return "external_command";
    case FsmEventKind::destruction_tick: return "destruction_tick";
    case FsmEventKind::destruction_complete: return "destruction_complete";
    }
    return "?";
}

std::string to_string(ExtCommand c)
{
    static const char* n[] = {"READ", "WRITE", "ACT", "PRE", "REF", "MRS", "DESTROY_ROW"};
    return n[int(c)];
}

std::string to_string(const FsmEvent& e)
{
    if (e.kind == FsmEventKind::external_command)
        return to_string(e.command);
    return to_string(e.kind);
}

bool is_data_command(const FsmEvent& e)
{
    return e.kind == FsmEventKind::external_command &&
           (e.command == ExtCommand::READ || e.command == ExtCommand::WRITE);
}

FsmStep fsm_step(const DramFsm& f, const FsmEvent& e)
{
    DramFsm g = f;
    switch (e.kind) {
    case FsmEventKind::power_on:
        if (f.state == FsmState::POWERED_OFF) {
            g.state = FsmState::DESTRUCTION_IN_PROGRESS;
            g.progress = 0;
        }
        return {g, true};
    case FsmEventKind::power_off:
        g.state = FsmState::POWERED_OFF;
        g.progress = 0;
        return {g, true};
    case FsmEventKind::external_command:
        if (f.state == FsmState::READY)
            return {g, true};
        if (f.state == FsmState::DESTRUCTION_IN_PROGRESS && f.variant == FsmVariant::command_based &&
            e.command == ExtCommand::DESTROY_ROW && f.progress < f.rows_total) {
            ++g.progress;
            return {g, true};
        }
        return {f, false};
    case FsmEventKind::destruction_tick:
        if (f.state == FsmState::DESTRUCTION_IN_PROGRESS && f.variant == FsmVariant::self_destruct &&
            f.progress < f.rows_total) {
            ++g.progress;
            return {g, true};
        }
        return {f, false};
    case FsmEventKind::destruction_complete:
        if (f.state == FsmState::DESTRUCTION_IN_PROGRESS && f.progress == f.rows_total) {
            g.state = FsmState::READY;
            return {g, true};
        }
        return {f, false};
    }
    return {f, false};
}

std::vector<FsmEvent> fsm_alphabet()
{
    std::vector<FsmEvent> a = {{FsmEventKind::power_on},
                               {FsmEventKind::power_off},
                               {FsmEventKind::destruction_tick},
                               {FsmEventKind::destruction_complete}};
    for (int k = 0; k < kExtCommands; ++k)
        a.push_back({FsmEventKind::external_command, ExtCommand(k)});
    return a;
}

namespace {

bool bad_step(const DramFsm& before, const FsmStep& s, const FsmEvent& e)
{
    if (before.state == FsmState::READY)
        return false;
    if (s.accepted && is_data_command(e))
        return true;
    return s.fsm.state == FsmState::READY && s.fsm.progress < s.fsm.rows_total;
}

DramFsm initial(FsmVariant v, std::uint64_t rows)
{
    DramFsm f;
    f.variant = v;
    f.rows_total = rows;
    return f;
}

using Key = std::tuple<int, std::uint64_t, int>;

}  // namespace

SafetyResult check_fsm_safety(FsmVariant v, std::uint64_t rows_total, int max_len, FsmStepFn step)
{
    const auto alpha = fsm_alphabet();
    const std::uint64_t n = alpha.size();
    // all[k]: sequences of length 0..k
    std::vector<std::uint64_t> all(max_len + 1, 1);
    for (int k = 1; k <= max_len; ++k)
        all[k] = all[k - 1] * n + 1;

    std::map<Key, std::uint64_t> memo;
    // sequences of length 1..d from f that contain a bad step
    std::function<std::uint64_t(const DramFsm&, int)> bad = [&](const DramFsm& f, int d) -> std::uint64_t {
        if (d == 0)
            return 0;
        Key key{int(f.state), f.progress, d};
        auto it = memo.find(key);
        if (it != memo.end())
            return it->second;
        std::uint64_t total = 0;
        for (const auto& e : alpha) {
            auto s = step(f, e);
            total += bad_step(f, s, e) ? all[d - 1] : bad(s.fsm, d - 1);
        }
        memo[key] = total;
        return total;
    };

    SafetyResult r;
    const DramFsm f0 = initial(v, rows_total);
    r.sequences = all[max_len] - 1;
    r.violations = bad(f0, max_len);

    if (r.violations) {
        // shortest counterexample by breadth-first search
        struct Node {
            DramFsm f;
            std::vector<FsmEvent> path;
        };
        std::deque<Node> q{{f0, {}}};
        std::map<std::pair<int, std::uint64_t>, bool> seen;
        while (!q.empty() && r.counterexample.empty()) {
            Node cur = q.front();
            q.pop_front();
            if (int(cur.path.size()) >= max_len)
                continue;
            for (const auto& e : alpha) {
                auto s = step(cur.f, e);
                auto path = cur.path;
                path.push_back(e);
                if (bad_step(cur.f, s, e)) {
                    r.counterexample = path;
                    break;
                }
                auto k = std::make_pair(int(s.fsm.state), s.fsm.progress);
                if (!seen[k]) {
                    seen[k] = true;
                    q.push_back({s.fsm, path});
                }
            }
        }
    }
    return r;
}

SafetyResult check_fsm_safety_bruteforce(FsmVariant v, std::uint64_t rows_total, int max_len, FsmStepFn step)
{
    const auto alpha = fsm_alphabet();
    SafetyResult r;
    std::vector<FsmEvent> path;
    std::function<void(const DramFsm&, bool)> walk = [&](const DramFsm& f, bool tainted) {
        for (const auto& e : alpha) {
            auto s = step(f, e);
            bool t = tainted || bad_step(f, s, e);
            path.push_back(e);
            ++r.sequences;
            if (t) {
                ++r.violations;
                if (r.counterexample.empty())
                    r.counterexample = path;
            }
            if (int(path.size()) < max_len)
                walk(s.fsm, t);
            path.pop_back();
        }
    };
    walk(initial(v, rows_total), false);
    return r;
}

}  // namespace dpsim
