#include "lavp/dqn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "lavp/errors.hpp"

namespace lavp {

void DqnConfig::validate() const {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw std::invalid_argument("epsilon must lie in [0, 1]");
    }
    if (batch == 0 || batch > capacity) {
        throw std::invalid_argument("batch must be in [1, capacity]");
    }
    if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in [0, 1]");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
    if (episodes < 0 || step_cap < 1 || train_every < 1 || epsilon_anneal_episodes < 0) {
        throw std::invalid_argument("episodes >= 0, step_cap >= 1 and train_every >= 1 required");
    }
}

double DqnConfig::epsilon_for_episode(int episode) const {
    if (epsilon_anneal_episodes <= 0) return epsilon;
    const double ramp = std::min(1.0, static_cast<double>(episode) /
                                          static_cast<double>(epsilon_anneal_episodes));
    return epsilon * ramp;
}

std::vector<double> encode_state(const EpisodeState& state, const Scenario& scenario,
                                 const GridMap& map) {
    const double sx = 1.0 / std::max(1, map.width_x() - 1);
    const double sy = 1.0 / std::max(1, map.width_y() - 1);
    std::vector<double> out;
    out.reserve(state_size(scenario.n_users()));
    const auto put = [&](Cell c) {
        out.push_back(c.x * sx);
        out.push_back(c.y * sy);
    };
    put(state.position);
    for (Cell c : scenario.pickups) put(c);
    for (Cell c : scenario.dropoffs) put(c);
    put(scenario.car_park);
    for (ServingStatus u : state.statuses) out.push_back(0.5 * static_cast<double>(u));
    return out;
}

std::size_t argmax_action(std::span<const double> q_values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < q_values.size(); ++i) {
        if (q_values[i] > q_values[best]) best = i;
    }
    return best;
}

std::size_t select_action(std::span<const double> q_values, double epsilon, Rng& rng) {
    if (uniform01(rng) < epsilon) return argmax_action(q_values);
    return uniform_index(rng, kActionCount);
}

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
}

void ReplayMemory::push(Experience e) {
    if (items_.size() < capacity_) {
        items_.push_back(std::move(e));
        return;
    }
    items_[head_] = std::move(e);
    head_ = (head_ + 1) % capacity_;
}

const Experience& ReplayMemory::at(std::size_t i) const {
    if (i >= items_.size()) throw std::out_of_range("replay index out of range");
    return items_[(head_ + i) % items_.size()];
}

std::vector<Experience> ReplayMemory::sample(std::size_t k, Rng& rng) const {
    const std::size_t n = items_.size();
    if (k > n) {
        throw InsufficientExperience("requested " + std::to_string(k) + " experiences but memory holds " +
                                     std::to_string(n));
    }
    std::vector<std::size_t> picks;
    picks.reserve(k);
    if (2 * k >= n) {
        // Partial Fisher-Yates over all indices.
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + uniform_index(rng, n - i);
            std::swap(idx[i], idx[j]);
            picks.push_back(idx[i]);
        }
    } else {
        // Floyd's algorithm: k draws, no rejection loop.
        std::unordered_set<std::size_t> chosen;
        chosen.reserve(2 * k);
        for (std::size_t j = n - k; j < n; ++j) {
            const std::size_t t = uniform_index(rng, j + 1);
            if (chosen.insert(t).second) {
                picks.push_back(t);
            } else {
                chosen.insert(j);
                picks.push_back(j);
            }
        }
    }
    std::vector<Experience> out;
    out.reserve(k);
    for (std::size_t i : picks) out.push_back(items_[i]);
    return out;
}

namespace {

Matrix stack_rows(std::span<const Experience> batch, bool next) {
    const auto rows = static_cast<Eigen::Index>(batch.size());
    const auto cols = static_cast<Eigen::Index>(batch.front().state.size());
    Matrix out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& v = next ? batch[static_cast<std::size_t>(i)].next_state
                             : batch[static_cast<std::size_t>(i)].state;
        if (static_cast<Eigen::Index>(v.size()) != cols) {
            throw ShapeMismatch("experiences in a batch have different state widths");
        }
        for (Eigen::Index c = 0; c < cols; ++c) out(i, c) = v[static_cast<std::size_t>(c)];
    }
    return out;
}

Matrix row_matrix(std::span<const double> v) {
    Matrix m(1, static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) m(0, static_cast<Eigen::Index>(i)) = v[i];
    return m;
}

std::vector<double> q_row(const Network& net, std::span<const double> state) {
    const Matrix q = predict(net, row_matrix(state));
    return {q.data(), q.data() + q.size()};
}

} // namespace

std::vector<double> td_targets(std::span<const Experience> batch, const Network& target,
                               double gamma) {
    std::vector<double> out(batch.size());
    if (batch.empty()) return out;
    const Matrix next_q = predict(target, stack_rows(batch, true));
    for (std::size_t i = 0; i < batch.size(); ++i) {
        out[i] = batch[i].reward;
        if (!batch[i].done) out[i] += gamma * next_q.row(static_cast<Eigen::Index>(i)).maxCoeff();
    }
    return out;
}

double train_step(Network& evaluation, Network& target, AdamState& adam,
                  const ReplayMemory& memory, const DqnConfig& cfg, Rng& rng) {
    const std::vector<Experience> batch = memory.sample(cfg.batch, rng);
    const std::vector<double> targets = td_targets(batch, target, cfg.gamma);

    const ForwardPass fp = forward(evaluation, stack_rows(batch, false));
    std::vector<std::size_t> actions(batch.size());
    std::vector<double> td(batch.size());
    double loss = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        actions[i] = batch[i].action;
        td[i] = targets[i] - fp.q(static_cast<Eigen::Index>(i),
                                  static_cast<Eigen::Index>(actions[i]));
        loss += td[i] * td[i];
    }
    loss /= static_cast<double>(batch.size());

    const Network grads = gradients(evaluation, fp.cache, actions, td);
    adam_step(evaluation, grads, adam);
    soft_update(target, evaluation, cfg.tau);
    return loss;
}

DqnTrainer::DqnTrainer(Scenario scenario, GridMap map, DqnConfig cfg, Rng rng)
    : scenario_(std::move(scenario)),
      map_(std::move(map)),
      cfg_(std::move(cfg)),
      rng_(std::move(rng)),
      memory_(cfg_.capacity) {
    cfg_.validate();
    validate_scenario(map_, scenario_);
    std::vector<std::size_t> sizes{state_size(scenario_.n_users())};
    sizes.insert(sizes.end(), cfg_.hidden.begin(), cfg_.hidden.end());
    sizes.push_back(kActionCount);
    evaluation_ = init_network(sizes, rng_);
    target_ = evaluation_;
    adam_ = make_adam(evaluation_, cfg_.learning_rate);
}

Scenario DqnTrainer::random_layout() {
    std::vector<Cell> free_cells;
    for (std::size_t i = 0; i < map_.cell_count(); ++i) {
        const Cell c = map_.cell_at(i);
        if (map_.is_free(c) && c != scenario_.initial && c != scenario_.car_park) {
            free_cells.push_back(c);
        }
    }
    const std::size_t n = scenario_.n_users();
    if (free_cells.size() < 2 * n) {
        throw std::invalid_argument("map has too few free cells for randomized spots");
    }
    for (std::size_t i = 0; i < 2 * n; ++i) {
        std::swap(free_cells[i], free_cells[i + uniform_index(rng_, free_cells.size() - i)]);
    }
    Scenario out = scenario_;
    out.pickups.assign(free_cells.begin(), free_cells.begin() + static_cast<std::ptrdiff_t>(n));
    out.dropoffs.assign(free_cells.begin() + static_cast<std::ptrdiff_t>(n),
                        free_cells.begin() + static_cast<std::ptrdiff_t>(2 * n));
    return out;
}

EpisodeRecord DqnTrainer::run_episode() {
    const Scenario episode_scenario = cfg_.randomize_spots ? random_layout() : scenario_;
    const EnvConfig env{cfg_.penalty, cfg_.step_cap};
    const double epsilon = cfg_.epsilon_for_episode(static_cast<int>(episodes_done_));

    EpisodeRecord rec;
    double loss_sum = 0.0;
    EpisodeState state = reset(episode_scenario);
    std::vector<double> encoded = encode_state(state, episode_scenario, map_);
    for (int t = 0; t < cfg_.step_cap; ++t) {
        std::size_t action = 0;
        if (uniform01(rng_) < epsilon) {
            action = argmax_action(q_row(evaluation_, encoded));
        } else {
            action = uniform_index(rng_, kActionCount);
        }
        StepOutcome out = step(state, kActions[action], episode_scenario, map_, env);
        std::vector<double> next_encoded = encode_state(out.next_state, episode_scenario, map_);
        memory_.push({encoded, action, out.reward, next_encoded, out.done});
        ++env_steps_;
        rec.reward += out.reward;
        rec.steps = out.next_state.step;

        if (memory_.size() >= cfg_.effective_warmup() && env_steps_ % cfg_.train_every == 0) {
            loss_sum += train_step(evaluation_, target_, adam_, memory_, cfg_, rng_);
            ++rec.updates;
        }
        state = std::move(out.next_state);
        encoded = std::move(next_encoded);
        if (out.done) {
            rec.success = true;
            break;
        }
    }
    rec.mean_loss = rec.updates > 0 ? loss_sum / static_cast<double>(rec.updates)
                                    : std::numeric_limits<double>::quiet_NaN();
    ++episodes_done_;
    return rec;
}

TrainingStats DqnTrainer::train(int episodes) {
    TrainingStats stats;
    stats.episodes.reserve(static_cast<std::size_t>(std::max(episodes, 0)));
    for (int e = 0; e < episodes; ++e) stats.episodes.push_back(run_episode());
    return stats;
}

TrainResult train(const Scenario& scenario, const GridMap& map, const DqnConfig& cfg, Rng& rng) {
    DqnTrainer trainer(scenario, map, cfg, rng);
    TrainResult out;
    out.stats = trainer.train(cfg.episodes);
    rng = trainer.rng();
    out.evaluation = trainer.evaluation();
    out.target = trainer.target();
    return out;
}

Rollout greedy_rollout(const Network& params, const Scenario& scenario, const GridMap& map,
                       int step_cap) {
    Rollout out;
    const std::size_t n = scenario.n_users();
    EpisodeState state = reset(scenario);
    out.cells.push_back(state.position);
    out.visit_order.push_back(0);
    const EnvConfig env{10.0, step_cap};
    for (int t = 0; t < step_cap; ++t) {
        const std::size_t action =
            argmax_action(q_row(params, encode_state(state, scenario, map)));
        StepOutcome step_out = step(state, kActions[action], scenario, map, env);
        out.distance += step_out.distance;
        if (!step_out.blocked) out.cells.push_back(step_out.next_state.position);
        for (const ServingEvent& e : step_out.events) {
            out.visit_order.push_back(e.kind == ServingEvent::Kind::Pickup ? e.user + 1
                                                                           : e.user + 1 + n);
        }
        state = std::move(step_out.next_state);
        if (step_out.done) {
            out.success = true;
            out.visit_order.push_back(2 * n + 1);
            break;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Binary checkpoint
//
// "LAVPCKPT" | u32 version | u64 episodes_done | u64 env_steps | str rng_state |
// net evaluation | net target | adam | replay
// Integers and doubles are stored in host byte order.

struct CheckpointAccess {
    static std::size_t& head(ReplayMemory& m) { return m.head_; }
    static std::size_t head(const ReplayMemory& m) { return m.head_; }
    static std::vector<Experience>& items(ReplayMemory& m) { return m.items_; }
    static const std::vector<Experience>& items(const ReplayMemory& m) { return m.items_; }
};

namespace {

constexpr char kMagic[8] = {'L', 'A', 'V', 'P', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    explicit Writer(std::ostream& os) : os_(os) {}

    template <typename T>
    void pod(T v) {
        os_.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }
    void u64(std::uint64_t v) { pod(v); }
    void f64(double v) { pod(v); }
    void str(const std::string& s) {
        u64(s.size());
        os_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }
    void doubles(const double* p, std::size_t n) {
        os_.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
    }
    void vec(const std::vector<double>& v) {
        u64(v.size());
        doubles(v.data(), v.size());
    }
    void network(const Network& net) {
        u64(net.layer_count());
        for (std::size_t l = 0; l < net.layer_count(); ++l) {
            const Matrix& w = net.weights[l];
            u64(static_cast<std::uint64_t>(w.rows()));
            u64(static_cast<std::uint64_t>(w.cols()));
            doubles(w.data(), static_cast<std::size_t>(w.size()));
            u64(static_cast<std::uint64_t>(net.biases[l].size()));
            doubles(net.biases[l].data(), static_cast<std::size_t>(net.biases[l].size()));
        }
    }

private:
    std::ostream& os_;
};

class Reader {
public:
    explicit Reader(std::istream& is) : is_(is) {}

    template <typename T>
    T pod() {
        T v{};
        is_.read(reinterpret_cast<char*>(&v), sizeof(T));
        check();
        return v;
    }
    std::uint64_t u64() { return pod<std::uint64_t>(); }
    double f64() { return pod<double>(); }
    std::uint64_t count(std::uint64_t limit = 1ULL << 32) {
        const std::uint64_t n = u64();
        if (n > limit) throw ParseError("checkpoint: implausible element count " + std::to_string(n));
        return n;
    }
    std::string str() {
        std::string s(count(), '\0');
        is_.read(s.data(), static_cast<std::streamsize>(s.size()));
        check();
        return s;
    }
    void doubles(double* p, std::size_t n) {
        is_.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n * sizeof(double)));
        check();
    }
    std::vector<double> vec() {
        std::vector<double> v(count());
        doubles(v.data(), v.size());
        return v;
    }
    Network network() {
        Network net;
        const std::uint64_t layers = count(64);
        for (std::uint64_t l = 0; l < layers; ++l) {
            const auto rows = static_cast<Eigen::Index>(count());
            const auto cols = static_cast<Eigen::Index>(count());
            Matrix w(rows, cols);
            doubles(w.data(), static_cast<std::size_t>(w.size()));
            Vector b(static_cast<Eigen::Index>(count()));
            doubles(b.data(), static_cast<std::size_t>(b.size()));
            net.weights.push_back(std::move(w));
            net.biases.push_back(std::move(b));
        }
        return net;
    }

private:
    void check() {
        if (!is_) throw ParseError("checkpoint: unexpected end of file");
    }
    std::istream& is_;
};

void read_header(Reader& r, std::istream& is) {
    char magic[sizeof(kMagic)];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw ParseError("checkpoint: bad magic, not a lavp checkpoint");
    }
    const auto version = r.pod<std::uint32_t>();
    if (version != kVersion) {
        throw ParseError("checkpoint: unsupported version " + std::to_string(version));
    }
}

} // namespace

void DqnTrainer::save(const std::filesystem::path& path) const {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write checkpoint " + path.string());
    Writer w(os);
    os.write(kMagic, sizeof(kMagic));
    w.pod(kVersion);
    w.u64(static_cast<std::uint64_t>(episodes_done_));
    w.u64(static_cast<std::uint64_t>(env_steps_));
    std::ostringstream rng_text;
    rng_text << rng_;
    w.str(rng_text.str());
    w.network(evaluation_);
    w.network(target_);

    w.u64(static_cast<std::uint64_t>(adam_.step));
    w.f64(adam_.beta1);
    w.f64(adam_.beta2);
    w.f64(adam_.epsilon);
    w.f64(adam_.learning_rate);
    w.network(adam_.first_moment);
    w.network(adam_.second_moment);

    const auto& items = CheckpointAccess::items(memory_);
    w.u64(memory_.capacity());
    w.u64(CheckpointAccess::head(memory_));
    w.u64(items.size());
    for (const Experience& e : items) {
        w.vec(e.state);
        w.u64(e.action);
        w.f64(e.reward);
        w.vec(e.next_state);
        w.pod<std::uint8_t>(e.done ? 1 : 0);
    }
    if (!os) throw std::runtime_error("failed writing checkpoint " + path.string());
}

DqnTrainer DqnTrainer::load(const std::filesystem::path& path, Scenario scenario, GridMap map,
                            DqnConfig cfg) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ParseError("cannot open checkpoint " + path.string());
    Reader r(is);
    read_header(r, is);

    const auto episodes = static_cast<long long>(r.u64());
    const auto env_steps = static_cast<long long>(r.u64());
    Rng rng;
    {
        std::istringstream rng_text(r.str());
        rng_text >> rng;
        if (!rng_text) throw ParseError("checkpoint: malformed generator state");
    }
    Network evaluation = r.network();
    Network target = r.network();

    AdamState adam;
    adam.step = static_cast<long long>(r.u64());
    adam.beta1 = r.f64();
    adam.beta2 = r.f64();
    adam.epsilon = r.f64();
    adam.learning_rate = r.f64();
    adam.first_moment = r.network();
    adam.second_moment = r.network();

    const std::uint64_t capacity = r.count(1ULL << 40);
    cfg.capacity = static_cast<std::size_t>(capacity);
    DqnTrainer trainer(std::move(scenario), std::move(map), std::move(cfg), Rng{});
    auto& memory = trainer.memory_;
    CheckpointAccess::head(memory) = static_cast<std::size_t>(r.u64());
    const std::uint64_t size = r.count(capacity);
    auto& items = CheckpointAccess::items(memory);
    items.reserve(size);
    for (std::uint64_t i = 0; i < size; ++i) {
        Experience e;
        e.state = r.vec();
        e.action = static_cast<std::size_t>(r.u64());
        e.reward = r.f64();
        e.next_state = r.vec();
        e.done = r.pod<std::uint8_t>() != 0;
        items.push_back(std::move(e));
    }

    if (!evaluation.same_shape(trainer.evaluation_) || !target.same_shape(trainer.evaluation_) ||
        !adam.first_moment.same_shape(trainer.evaluation_) ||
        !adam.second_moment.same_shape(trainer.evaluation_)) {
        throw ShapeMismatch("checkpoint network shape does not match the scenario and config");
    }
    trainer.evaluation_ = std::move(evaluation);
    trainer.target_ = std::move(target);
    trainer.adam_ = std::move(adam);
    trainer.rng_ = rng;
    trainer.episodes_done_ = episodes;
    trainer.env_steps_ = env_steps;
    return trainer;
}

Network load_evaluation_network(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ParseError("cannot open checkpoint " + path.string());
    Reader r(is);
    read_header(r, is);
    r.u64();
    r.u64();
    r.str();
    return r.network();
}

} // namespace lavp
