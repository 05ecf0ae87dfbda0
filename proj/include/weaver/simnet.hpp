#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "weaver/graph.hpp"
#include "weaver/rng.hpp"

namespace weaver {

/// One in-flight lazy-random-walk message.
struct WalkToken {
    NodeId origin = 0;
    int phase = 0;
    std::uint32_t steps_left = 0;
    std::uint32_t walk_index = 0;
};

/// One line of the optional per-round trace.
struct RoundTrace {
    std::uint64_t round;
    std::size_t live_tokens;
    std::size_t max_edge_load;
};

/// Endpoint of a finished walk.
struct WalkEndpoint {
    NodeId origin;
    std::uint32_t walk_index;
    NodeId node;
};

/// Synchronous round engine. Each token performs a lazy random walk over one
/// phase's edges, confined to the box of side `box_side` centered on its
/// origin; at most `kappa` tokens cross any edge direction per round.
///
/// Lazy step rule at node v: with probability 1 - deg_box(v)/(delta+1) the
/// token holds (consuming one step in place), otherwise it commits to a
/// uniformly chosen eligible neighbor. A committed move crosses as soon as
/// the edge direction has capacity; waiting consumes no steps. A token with
/// no eligible neighbors holds until its steps run out and terminates in
/// place.
///
/// Randomness is counter-based per (origin, walk_index), so trajectories are
/// reproducible and independent of iteration order. Contention for an edge
/// direction is resolved in (origin, walk_index) order. Runs of consecutive
/// holds are batched internally (the token sleeps until its next move draw);
/// round accounting and trajectories are identical to a one-step-per-round
/// sweep.
class RoundEngine {
public:
    RoundEngine(const EmbeddedGraph& g, int walk_phase, double box_side,
                std::size_t delta, std::size_t kappa, std::uint64_t master_seed)
        : g_(&g),
          walk_phase_(walk_phase),
          box_side_(box_side),
          delta_(delta),
          kappa_(kappa),
          master_seed_(master_seed) {}

    void inject(const std::vector<WalkToken>& tokens, std::uint32_t walk_length) {
        for (const auto& t : tokens) {
            Live l;
            l.node = t.origin;
            l.origin = t.origin;
            l.walk_index = t.walk_index;
            l.steps_left = static_cast<std::uint16_t>(walk_length);
            l.consumed = 0;
            l.pending = -1;
            l.finishing = false;
            if (walk_length == 0) {
                emit(l);
            } else {
                wake(1, l);
                ++live_;
            }
        }
        total_injected_ += tokens.size();
    }

    std::uint64_t round() const { return round_; }
    std::size_t live_tokens() const { return live_; }
    std::size_t max_edge_load_seen() const { return max_edge_load_seen_; }
    std::size_t total_injected() const { return total_injected_; }
    std::size_t total_finished() const { return total_finished_; }

    /// Finished walks land here unless on_finish is set.
    const std::vector<WalkEndpoint>& endpoints() const { return done_; }

    std::function<void(const WalkEndpoint&)> on_finish;
    std::function<void(const RoundTrace&)> trace;

    /// Advances one synchronous round; returns tokens still live.
    std::size_t step_round() {
        ++round_;
        edge_load_.clear();
        std::size_t max_load = 0;

        auto bucket_it = buckets_.find(round_);
        if (bucket_it != buckets_.end()) {
            auto bucket = std::move(bucket_it->second);
            buckets_.erase(bucket_it);
            std::sort(bucket.begin(), bucket.end(), [](const Live& a, const Live& b) {
                return std::tie(a.node, a.origin, a.walk_index) <
                       std::tie(b.node, b.origin, b.walk_index);
            });
            NodeId cached_node = 0, cached_origin = 0;
            bool cache_valid = false;
            for (auto& tok : bucket) {
                if (tok.finishing) {
                    finish(tok);
                    continue;
                }
                if (tok.pending < 0) {
                    if (!cache_valid || cached_node != tok.node ||
                        cached_origin != tok.origin) {
                        fill_eligible(tok.node, tok.origin);
                        cached_node = tok.node;
                        cached_origin = tok.origin;
                        cache_valid = true;
                    }
                    if (!plan(tok)) continue;  // finished or sleeping
                }
                // committed move: cross if the edge has capacity this round
                const NodeId w = static_cast<NodeId>(tok.pending);
                auto& load = edge_load_[edge_key(tok.node, w)];
                if (load < kappa_) {
                    ++load;
                    max_load = std::max<std::size_t>(max_load, load);
                    tok.node = w;
                    tok.pending = -1;
                    --tok.steps_left;
                    if (tok.steps_left == 0)
                        finish(tok);
                    else
                        wake(round_ + 1, tok);
                } else {
                    wake(round_ + 1, tok);  // blocked; no step consumed
                }
            }
        }

        if (trace) trace(RoundTrace{round_, live_, max_load});
        max_edge_load_seen_ = std::max(max_edge_load_seen_, max_load);
        return live_;
    }

    /// Runs rounds until every token has finished; returns rounds consumed.
    std::uint64_t run_until_done() {
        while (live_ > 0) step_round();
        return round_;
    }

private:
    struct Live {
        NodeId node;
        NodeId origin;
        std::uint32_t walk_index;
        std::int32_t pending;       // committed move target, -1 if none
        std::uint16_t steps_left;
        std::uint16_t consumed;     // counter of drawn steps
        bool finishing;             // wakes only to terminate in place
    };

    static std::uint64_t edge_key(NodeId from, NodeId to) {
        return (static_cast<std::uint64_t>(from) << 32) | to;
    }

    std::uint64_t token_stream(const Live& t) const {
        return mix64(stream_seed(master_seed_, t.origin,
                                 static_cast<std::uint64_t>(walk_phase_),
                                 StreamPurpose::Walk),
                     t.walk_index);
    }

    void wake(std::uint64_t at, const Live& tok) { buckets_[at].push_back(tok); }

    void emit(const Live& tok) {
        const WalkEndpoint e{tok.origin, tok.walk_index, tok.node};
        ++total_finished_;
        if (on_finish)
            on_finish(e);
        else
            done_.push_back(e);
    }

    void finish(const Live& tok) {
        emit(tok);
        --live_;
    }

    void fill_eligible(NodeId v, NodeId origin) {
        const Box box{g_->point(origin), box_side_};
        const TagMask bit = TagMask{1} << walk_phase_;
        eligible_.clear();
        for (const auto& h : g_->neighbors(v)) {
            if (!(h.tags & bit)) continue;
            if (!box.contains(g_->point(h.to))) continue;
            eligible_.push_back(h.to);
        }
    }

    /// Draws the token's next steps at its current node: a run of h >= 0
    /// holds (occupying rounds round_ .. round_+h-1) followed by one move
    /// commitment, or termination in place. Returns true when the token has
    /// a move to attempt in the current round.
    bool plan(Live& tok) {
        const std::uint32_t steps = tok.steps_left;
        if (eligible_.empty()) {
            tok.consumed += steps;
            tok.steps_left = 0;
            tok.finishing = true;
            if (steps <= 1)
                finish(tok);
            else
                wake(round_ + steps - 1, tok);
            return false;
        }
        const std::uint64_t stream = token_stream(tok);
        const double move_p = std::min(
            1.0, static_cast<double>(eligible_.size()) /
                     (static_cast<double>(delta_) + 1.0));
        std::uint32_t h = 0;
        while (h < steps && counter_double(stream, tok.consumed + h, 0) >= move_p)
            ++h;
        if (h == steps) {
            tok.consumed += h;
            tok.steps_left = 0;
            tok.finishing = true;
            if (h <= 1)
                finish(tok);
            else
                wake(round_ + h - 1, tok);
            return false;
        }
        const auto pick = counter_index(stream, tok.consumed + h, 1, eligible_.size());
        tok.pending = static_cast<std::int32_t>(eligible_[pick]);
        tok.consumed += h + 1;
        tok.steps_left -= h;
        if (h > 0) {
            wake(round_ + h, tok);  // holds first; the move draw fires later
            return false;
        }
        return true;
    }

    const EmbeddedGraph* g_;
    int walk_phase_;
    double box_side_;
    std::size_t delta_;
    std::size_t kappa_;
    std::uint64_t master_seed_;

    std::unordered_map<std::uint64_t, std::vector<Live>> buckets_;
    std::vector<WalkEndpoint> done_;
    std::unordered_map<std::uint64_t, std::uint32_t> edge_load_;
    std::vector<NodeId> eligible_;
    std::uint64_t round_ = 0;
    std::size_t live_ = 0;
    std::size_t total_injected_ = 0;
    std::size_t total_finished_ = 0;
    std::size_t max_edge_load_seen_ = 0;
};

}  // namespace weaver
