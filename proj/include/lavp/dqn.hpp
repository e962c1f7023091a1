#pragma once

// Deep Q-learning agent for the valet-parking grid world: state encoding,
// epsilon-greedy control, experience replay, TD targets and the training loop.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lavp/grid.hpp"
#include "lavp/neural.hpp"
#include "lavp/random.hpp"

namespace lavp {

struct DqnConfig {
    double gamma = 0.99;
    /// Probability of taking the greedy action.
    double epsilon = 0.9;
    std::size_t batch = 256;
    std::size_t capacity = 1'000'000;
    double tau = 0.001;
    double learning_rate = 3e-4;
    int episodes = 3500;
    int step_cap = 100;
    double penalty = 10.0;
    /// Learning starts once the memory holds max(batch, warmup) transitions.
    std::size_t warmup = 1000;
    /// Environment steps between gradient updates.
    int train_every = 1;
    /// When > 0, the greedy probability ramps linearly from 0 to epsilon over this many episodes.
    int epsilon_anneal_episodes = 0;
    std::vector<std::size_t> hidden = kDefaultHidden;
    /// Draw fresh pickup/dropoff cells every episode instead of the fixed scenario.
    bool randomize_spots = false;

    void validate() const;
    std::size_t effective_warmup() const { return std::max(batch, warmup); }
    double epsilon_for_episode(int episode) const;
};

/// Width of encode_state for N users.
inline std::size_t state_size(std::size_t n_users) { return 5 * n_users + 4; }

/// [AV x,y | pickups x,y | dropoffs x,y | CP x,y | statuses], coordinates scaled
/// by 1/(Z-1) and statuses by 1/2, so every entry lies in [0, 1].
std::vector<double> encode_state(const EpisodeState& state, const Scenario& scenario,
                                 const GridMap& map);

/// Greedy (lowest index on ties) with probability `epsilon`, uniform otherwise.
std::size_t select_action(std::span<const double> q_values, double epsilon, Rng& rng);

std::size_t argmax_action(std::span<const double> q_values);

struct Experience {
    std::vector<double> state;
    std::size_t action = 0;
    double reward = 0.0;
    std::vector<double> next_state;
    bool done = false;

    friend bool operator==(const Experience&, const Experience&) = default;
};

/// Bounded FIFO of transitions; the oldest entry is overwritten once full.
class ReplayMemory {
public:
    explicit ReplayMemory(std::size_t capacity);

    void push(Experience e);
    /// k distinct entries drawn uniformly. Throws InsufficientExperience if k > size().
    std::vector<Experience> sample(std::size_t k, Rng& rng) const;

    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    /// i-th entry counted from the oldest.
    const Experience& at(std::size_t i) const;

    friend bool operator==(const ReplayMemory&, const ReplayMemory&) = default;

private:
    friend struct CheckpointAccess;

    std::size_t capacity_;
    std::size_t head_ = 0; // next slot to overwrite once full
    std::vector<Experience> items_;
};

/// r if done, else r + gamma * max_a' Q(s', a'; target).
std::vector<double> td_targets(std::span<const Experience> batch, const Network& target,
                               double gamma);

/// One learning update; returns the batch loss before the update.
double train_step(Network& evaluation, Network& target, AdamState& adam,
                  const ReplayMemory& memory, const DqnConfig& cfg, Rng& rng);

struct EpisodeRecord {
    double reward = 0.0;
    int steps = 0;
    bool success = false;
    /// Mean loss of the updates made during the episode; NaN when there were none.
    double mean_loss = 0.0;
    std::size_t updates = 0;
};

struct TrainingStats {
    std::vector<EpisodeRecord> episodes;
};

/// Owns everything the training loop mutates, so a run can be checkpointed
/// and resumed bit-exactly.
class DqnTrainer {
public:
    DqnTrainer(Scenario scenario, GridMap map, DqnConfig cfg, Rng rng);

    EpisodeRecord run_episode();
    TrainingStats train(int episodes);

    const Network& evaluation() const { return evaluation_; }
    const Network& target() const { return target_; }
    const AdamState& adam() const { return adam_; }
    const ReplayMemory& memory() const { return memory_; }
    const Rng& rng() const { return rng_; }
    const DqnConfig& config() const { return cfg_; }
    long long episodes_done() const { return episodes_done_; }

    void save(const std::filesystem::path& path) const;
    /// Restores a trainer from `save` output. Throws ParseError on a malformed file
    /// and ShapeMismatch if the stored network does not fit the scenario.
    static DqnTrainer load(const std::filesystem::path& path, Scenario scenario, GridMap map,
                           DqnConfig cfg);

private:
    Scenario random_layout();

    Scenario scenario_;
    GridMap map_;
    DqnConfig cfg_;
    Rng rng_;
    Network evaluation_;
    Network target_;
    AdamState adam_;
    ReplayMemory memory_;
    long long episodes_done_ = 0;
    long long env_steps_ = 0;
};

struct TrainResult {
    Network evaluation;
    Network target;
    TrainingStats stats;
};

/// Runs cfg.episodes episodes from freshly initialized networks.
TrainResult train(const Scenario& scenario, const GridMap& map, const DqnConfig& cfg, Rng& rng);

struct Rollout {
    std::vector<Cell> cells;
    double distance = 0.0;
    bool success = false;
    /// Spots in the order they were served (IS first, CP last on success).
    std::vector<std::size_t> visit_order;
};

/// Pure-greedy episode with the given parameters.
Rollout greedy_rollout(const Network& params, const Scenario& scenario, const GridMap& map,
                       int step_cap);

/// Reads only the evaluation network from a checkpoint file.
Network load_evaluation_network(const std::filesystem::path& path);

} // namespace lavp
