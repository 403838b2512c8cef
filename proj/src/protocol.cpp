/**
 * Copyright 2026 The hotlive Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "protocol.hpp"

#include <stdexcept>
#include <tuple>

namespace hotlive {

const char *to_string(EventKind kind) {
    switch (kind) {
    case EventKind::Prepared: return "Prepared";
    case EventKind::Locked: return "Locked";
    case EventKind::Executed: return "Executed";
    case EventKind::EnteredView: return "EnteredView";
    case EventKind::BlameBroadcast: return "BlameBroadcast";
    case EventKind::QuitView: return "QuitView";
    }
    return "?";
}

ReplicaState initial_state(ProcessId id, const BlockStore &store) {
    ReplicaState s;
    s.id = id;
    s.prepared = s.lock = s.exec = store.genesis();
    s.high_qc = s.locked_qc = genesis_qc(store);
    s.executed.insert(store.genesis());
    return s;
}

std::uint32_t ReplicaContext::leader_of(ViewNumber view) const {
    if (view >= 1 && view <= leaders.size()) return leaders[view - 1];
    return static_cast<std::uint32_t>((view % config.n) + 1);
}

std::string proposal_payload(const ProcessId &leader, ViewNumber view, std::uint32_t counter) {
    return "L" + leader.str() + "/v" + std::to_string(view) + "/p" + std::to_string(counter);
}

bool safe_to_vote(const Block &block, ViewNumber justify_view, const ReplicaState &state, const BlockStore &store) {
    return store.extends(block.digest, state.lock) || justify_view > state.locked_qc.view;
}

namespace {

class Machine {
public:
    Machine(Step &step, ReplicaContext &ctx, SimTime now) : step_(step), s_(step.state), ctx_(ctx), now_(now) {}

    bool sync() const { return ctx_.config.kind == ProtocolKind::SyncHotStuff; }
    bool two_phase() const { return ctx_.config.kind == ProtocolKind::TwoPhaseHotStuff; }
    bool is_leader() const { return ctx_.leader_of(s_.view) == s_.id.index; }

    void enter(ViewNumber view) {
        if (view <= s_.view) return;
        if (s_.view > 0) step_.exits.push_back({s_.view, s_.triple(), now_});
        s_.view = view;
        s_.voted.reset();
        s_.stage = Phase::Prepare;
        s_.stopped_voting = false;
        s_.proposals_by_height.clear();
        s_.votes_by_height.clear();
        s_.reports.clear();
        s_.proposal.reset();
        s_.proposal_count = 0;
        s_.last_proposal_at = -1;
        s_.slot_end = 0;
        s_.vote_buffer.clear();
        s_.pending_qcs.clear();
        s_.blame_sent = false;
        s_.quitting = false;
        s_.blamers.clear();
        emit(EventKind::EnteredView, std::nullopt);

        const auto &t = ctx_.timing;
        if (sync()) {
            send_to_leader(MessageKind::NewView, std::nullopt, s_.locked_qc);
            s_.blame_deadline = now_ + 5 * t.delta_ms + 2 * t.base_delay_ms;
            arm(TimerKind::BlameTimeout, s_.blame_deadline);
            arm(TimerKind::ViewTimeout, now_ + t.sync_view_limit_ms);
            if (is_leader()) arm(TimerKind::ProposeSlot, now_ + 2 * t.delta_ms);
        } else {
            send_to_leader(MessageKind::NewView, std::nullopt, s_.high_qc);
            arm(TimerKind::ViewTimeout, now_ + t.view_timeout_ms);
        }

        // Replay buffered messages for this view; later views stay buffered.
        std::vector<Message> pending;
        pending.swap(s_.future);
        for (auto &m : pending) {
            if (m.view == s_.view)
                deliver(m);
            else if (m.view > s_.view)
                s_.future.push_back(std::move(m));
        }
    }

    void deliver(const Message &m) {
        if (m.view < s_.view) {
            ++s_.stale_dropped;
            return;
        }
        if (m.view > s_.view) {
            s_.future.push_back(m);
            return;
        }
        if (sync())
            sync_message(m);
        else
            hotstuff_message(m);
    }

    void timer(const TimerRequest &t) {
        switch (t.kind) {
        case TimerKind::ViewTimeout:
            if (t.view == s_.view) enter(s_.view + 1);
            return;
        case TimerKind::BlameTimeout:
            if (sync() && t.view == s_.view && t.fire_at == s_.blame_deadline && !s_.quitting) send_blame();
            return;
        case TimerKind::CommitTimeout:
            if (sync()) commit_timeout(t);
            return;
        case TimerKind::ViewChangeWait:
            if (sync() && t.view == s_.view && s_.quitting) enter(s_.view + 1);
            return;
        case TimerKind::ProposeSlot:
            if (sync() && t.view == s_.view && is_leader()) sync_try_propose();
            return;
        }
    }

private:
    // ---- plumbing ----
    void emit(EventKind kind, std::optional<BlockDigest> block) {
        step_.events.push_back({kind, block, s_.view, now_});
    }
    void arm(TimerKind kind, SimTime at, std::optional<BlockDigest> block = std::nullopt) {
        step_.timers.push_back({kind, at, s_.view, block});
    }
    Message make(MessageKind kind, std::optional<BlockDigest> block, std::optional<QuorumCertificate> qc) const {
        Message m;
        m.kind = kind;
        m.sender = s_.id;
        m.view = s_.view;
        m.block = block;
        m.qc = std::move(qc);
        return m;
    }
    void send_to_leader(MessageKind kind, std::optional<BlockDigest> block, std::optional<QuorumCertificate> qc) {
        Message m = make(kind, block, std::move(qc));
        m.recipient = ctx_.leader_of(s_.view);
        step_.outbound.push_back(std::move(m));
    }
    void broadcast(Message m) { step_.outbound.push_back(std::move(m)); }

    const Block &propose_child(const BlockDigest &parent, const QuorumCertificate &justify) {
        ++s_.proposal_count;
        Block b = make_child(ctx_.store.get(parent), s_.view, proposal_payload(s_.id, s_.view, s_.proposal_count));
        const Block &stored = ctx_.store.insert(std::move(b));
        s_.proposal = stored.digest;
        s_.last_proposal_at = now_;
        broadcast(make(MessageKind::Propose, stored.digest, justify));
        return stored;
    }

    void execute_up_to(const BlockDigest &target) {
        for (const auto &d : ctx_.store.path(s_.exec, target)) {
            if (s_.executed.insert(d).second) emit(EventKind::Executed, d);
        }
        s_.exec = target;
    }

    // ---- Basic and 2-Phase HotStuff ----
    static Phase vote_phase(MessageKind k) {
        switch (k) {
        case MessageKind::VotePrepare: return Phase::Prepare;
        case MessageKind::VotePreCommit: return Phase::PreCommit;
        default: return Phase::Commit;
        }
    }

    void hotstuff_message(const Message &m) {
        const auto leader = ctx_.leader_of(s_.view);
        switch (m.kind) {
        case MessageKind::NewView:
            if (is_leader() && !s_.proposal && m.qc) hotstuff_new_view(m);
            return;
        case MessageKind::Propose:
            if (m.sender.index == leader && m.block && m.qc) hotstuff_propose(m);
            return;
        case MessageKind::VotePrepare:
        case MessageKind::VotePreCommit:
        case MessageKind::VoteCommit:
            if (is_leader() && s_.proposal && m.block == s_.proposal) hotstuff_vote(m);
            return;
        case MessageKind::QCAnnounce:
            if (m.sender.index == leader && m.qc) hotstuff_qc(*m.qc);
            return;
        case MessageKind::Blame:
        case MessageKind::BlameForward:
            return; // not part of this protocol
        }
    }

    void hotstuff_new_view(const Message &m) {
        s_.reports.emplace(m.sender.index, *m.qc);
        if (s_.reports.size() < ctx_.config.quorum_size()) return;
        const QuorumCertificate *best = nullptr;
        for (const auto &[idx, qc] : s_.reports)
            if (!best || qc.view > best->view) best = &qc;
        QuorumCertificate justify = *best;
        propose_child(justify.block, justify);
    }

    void hotstuff_propose(const Message &m) {
        if (s_.voted) return;
        if (!ctx_.store.contains(*m.block)) return; // no block-sync subprotocol
        const Block &b = ctx_.store.get(*m.block);
        if (b.parent != m.qc->block || b.view != s_.view) return;
        if (!safe_to_vote(b, m.qc->view, s_, ctx_.store)) return;
        s_.voted = b.digest;
        s_.stage = Phase::Prepare;
        send_to_leader(MessageKind::VotePrepare, b.digest, std::nullopt);
    }

    void hotstuff_vote(const Message &m) {
        const Phase phase = vote_phase(m.kind);
        auto key = std::make_pair(*m.block, phase);
        auto &signers = s_.vote_buffer[key];
        signers.insert(m.sender.index);
        if (signers.size() < ctx_.config.quorum_size()) return;
        if (auto formed = s_.pending_qcs.find(*m.block); formed != s_.pending_qcs.end() && formed->second.phase >= phase)
            return;
        QuorumCertificate qc{*m.block, s_.view, phase, signers};
        s_.pending_qcs[*m.block] = qc;
        broadcast(make(MessageKind::QCAnnounce, std::nullopt, qc));
    }

    void hotstuff_qc(const QuorumCertificate &qc) {
        if (!s_.voted || qc.block != *s_.voted || qc.view != s_.view || qc.phase != s_.stage) return;
        if (qc.signers.size() < ctx_.config.quorum_size()) return;
        switch (qc.phase) {
        case Phase::Prepare:
            s_.prepared = qc.block;
            s_.high_qc = qc;
            emit(EventKind::Prepared, qc.block);
            if (two_phase()) {
                lock_on(qc);
                s_.stage = Phase::Commit;
                send_to_leader(MessageKind::VoteCommit, qc.block, std::nullopt);
            } else {
                s_.stage = Phase::PreCommit;
                send_to_leader(MessageKind::VotePreCommit, qc.block, std::nullopt);
            }
            return;
        case Phase::PreCommit:
            lock_on(qc);
            s_.stage = Phase::Commit;
            send_to_leader(MessageKind::VoteCommit, qc.block, std::nullopt);
            return;
        case Phase::Commit:
            if (!ctx_.store.extends(qc.block, s_.exec))
                throw std::logic_error("replica " + s_.id.str() + " asked to execute a block off its chain");
            execute_up_to(qc.block);
            s_.stage = Phase::Generic;
            enter(s_.view + 1);
            return;
        case Phase::Generic:
            return;
        }
    }

    void lock_on(const QuorumCertificate &qc) {
        if (qc.view <= s_.locked_qc.view)
            throw std::logic_error("lock would move to a QC that is not newer");
        s_.lock = qc.block;
        s_.locked_qc = qc;
        emit(EventKind::Locked, qc.block);
    }

    // ---- early Sync HotStuff ----
    std::tuple<ViewNumber, std::uint64_t> rank(const QuorumCertificate &qc) const {
        return {qc.view, ctx_.store.get(qc.block).height};
    }

    void observe(const BlockDigest &d) {
        if (ctx_.store.contains(d)) s_.observed.insert(d);
    }

    void sync_update_lock(const QuorumCertificate &qc) {
        if (!ctx_.store.contains(qc.block)) return;
        if (rank(qc) <= rank(s_.locked_qc)) return;
        s_.lock = qc.block;
        s_.locked_qc = qc;
        s_.high_qc = qc;
        emit(EventKind::Locked, qc.block);
    }

    void sync_message(const Message &m) {
        if (m.block) observe(*m.block);
        if (m.qc) observe(m.qc->block);
        switch (m.kind) {
        case MessageKind::NewView:
            if (is_leader() && m.qc) s_.reports.emplace(m.sender.index, *m.qc);
            return;
        case MessageKind::Propose:
            if (m.sender.index == ctx_.leader_of(s_.view) && m.block && m.qc) sync_propose(m);
            return;
        case MessageKind::VotePrepare:
            if (m.block) sync_vote(m);
            return;
        case MessageKind::Blame:
            s_.blamers.insert(m.sender.index);
            if (s_.blamers.size() >= ctx_.config.f + 1) quit_view();
            return;
        case MessageKind::BlameForward:
            if (m.blamers.size() >= ctx_.config.f + 1) {
                s_.blamers.insert(m.blamers.begin(), m.blamers.end());
                quit_view();
            }
            return;
        case MessageKind::VotePreCommit:
        case MessageKind::VoteCommit:
        case MessageKind::QCAnnounce:
            return; // not part of this protocol
        }
    }

    void sync_propose(const Message &m) {
        if (!ctx_.store.contains(*m.block) || !ctx_.store.contains(m.qc->block)) return;
        const Block &b = ctx_.store.get(*m.block);
        if (b.view != s_.view) return;
        auto seen = s_.proposals_by_height.find(b.height);
        if (seen != s_.proposals_by_height.end()) {
            if (seen->second != b.digest) send_blame(); // equivocating leader
            return;
        }
        s_.proposals_by_height.emplace(b.height, b.digest);
        if (m.qc->signers.size() >= ctx_.config.quorum_size() || m.qc->view == 0) sync_update_lock(*m.qc);
        if (s_.stopped_voting || s_.votes_by_height.count(b.height)) return;
        if (b.parent != m.qc->block || !ctx_.store.extends(b.digest, s_.lock)) {
            send_blame(); // refusing to vote triggers a view change
            return;
        }
        s_.votes_by_height.emplace(b.height, b.digest);
        broadcast(make(MessageKind::VotePrepare, b.digest, std::nullopt));
        if (s_.prepared != b.digest) {
            s_.prepared = b.digest;
            emit(EventKind::Prepared, b.digest);
        }
        const auto &t = ctx_.timing;
        s_.commit_deadlines[b.digest] = now_ + 2 * t.delta_ms;
        arm(TimerKind::CommitTimeout, now_ + 2 * t.delta_ms, b.digest);
        s_.blame_deadline = now_ + 3 * t.delta_ms;
        arm(TimerKind::BlameTimeout, s_.blame_deadline);
    }

    void sync_vote(const Message &m) {
        auto key = std::make_pair(*m.block, Phase::Generic);
        auto &signers = s_.vote_buffer[key];
        signers.insert(m.sender.index);
        if (signers.size() < ctx_.config.quorum_size() || s_.pending_qcs.count(*m.block)) return;
        QuorumCertificate qc{*m.block, s_.view, Phase::Generic, signers};
        s_.pending_qcs.emplace(*m.block, qc);
        sync_update_lock(qc);
        if (is_leader() && s_.proposal == *m.block) sync_try_propose();
    }

    void sync_try_propose() {
        const auto &t = ctx_.timing;
        if (s_.quitting) return;
        if (!s_.proposal) {
            QuorumCertificate best = s_.locked_qc;
            for (const auto &[idx, qc] : s_.reports)
                if (ctx_.store.contains(qc.block) && rank(qc) > rank(best)) best = qc;
            propose_child(best.block, best);
            s_.slot_end = now_ + 2 * t.delta_ms;
            return;
        }
        auto certified = s_.pending_qcs.find(*s_.proposal);
        if (certified == s_.pending_qcs.end()) return;
        const SimTime earliest = s_.last_proposal_at + t.delta_ms;
        if (now_ < earliest) {
            if (earliest < s_.slot_end) arm(TimerKind::ProposeSlot, earliest);
            return;
        }
        if (now_ >= s_.slot_end) return;
        QuorumCertificate justify = certified->second;
        propose_child(justify.block, justify);
    }

    void send_blame() {
        if (s_.blame_sent) return;
        s_.blame_sent = true;
        broadcast(make(MessageKind::Blame, std::nullopt, std::nullopt));
        emit(EventKind::BlameBroadcast, std::nullopt);
    }

    void quit_view() {
        if (s_.quitting) return;
        s_.quitting = true;
        s_.stopped_voting = true;
        Message fwd = make(MessageKind::BlameForward, std::nullopt, std::nullopt);
        fwd.blamers = s_.blamers;
        broadcast(std::move(fwd));
        emit(EventKind::QuitView, std::nullopt);
        arm(TimerKind::ViewChangeWait, now_ + 2 * ctx_.timing.delta_ms);
    }

    void commit_timeout(const TimerRequest &t) {
        if (!t.block) throw std::logic_error("commit timer without a block");
        if (!ctx_.store.contains(*t.block)) throw LookupError("commit timer for unknown block " + t.block->hex());
        const BlockDigest b = *t.block;
        s_.commit_deadlines.erase(b);
        auto &store = ctx_.store;
        if (store.extends(s_.exec, b)) return; // already committed through a descendant
        const ViewNumber bview = store.get(b).view;
        for (const auto &o : s_.observed)
            if (store.get(o).view >= bview && store.conflicts(o, b)) return;
        if (store.conflicts(s_.lock, b) || !store.extends(b, s_.exec)) return;
        execute_up_to(b);
    }

    Step &step_;
    ReplicaState &s_;
    ReplicaContext &ctx_;
    SimTime now_;
};

} // namespace

Step enter_view(const ReplicaState &state, ViewNumber view, SimTime now, ReplicaContext &ctx) {
    Step step{state, {}, {}, {}, {}};
    Machine(step, ctx, now).enter(view);
    return step;
}

Step handle_message(const ReplicaState &state, const Message &msg, SimTime now, ReplicaContext &ctx) {
    Step step{state, {}, {}, {}, {}};
    Machine(step, ctx, now).deliver(msg);
    return step;
}

Step on_timer(const ReplicaState &state, const TimerRequest &timer, SimTime now, ReplicaContext &ctx) {
    Step step{state, {}, {}, {}, {}};
    Machine(step, ctx, now).timer(timer);
    return step;
}

} // namespace hotlive
