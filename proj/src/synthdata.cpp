// Copyright (C) 2026 The panoact Authors
// SPDX-License-Identifier: Apache-2.0
//
#include "panoact/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "panoact/relation.hpp"

namespace panoact {

namespace {

constexpr double kBoxWidth = 0.02, kWidthJitter = 0.002;
constexpr double kBoxHeight = 0.2, kHeightJitter = 0.01;
constexpr double kMemberGap = 0.012;
constexpr double kBlockGap = 0.06;
constexpr double kMargin = 0.01;
constexpr double kWalkSpeed = 0.01;
constexpr double kDistractorTravel = 0.3;
constexpr double kYJitter = 0.005;
constexpr double kPrototypeScale = 0.5;
constexpr double kCosineFloor = 0.9;

constexpr std::size_t kRoles = 3;
constexpr std::size_t kSecondaryBase = 12, kSecondaryCount = 15, kSecondaryChoices = 3;
constexpr std::size_t kSizeBucketBase = 4;
constexpr std::size_t kManyGroupsClass = 4, kSingletonClass = 5, kUniformClass = 6;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::vector<double> prototype(std::uint64_t seed, std::uint64_t tag, std::size_t dim) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(tag)));
    std::normal_distribution<double> dist(0.0, kPrototypeScale);
    std::vector<double> v(dim);
    for (auto& x : v) x = dist(rng);
    return v;
}

struct Person {
    std::size_t group = 0;  // raw group index
    std::size_t archetype = 0;
    std::size_t role = 0;
    bool distractor = false;
    std::vector<Box> boxes;  // per frame, block-local x
    std::vector<std::size_t> actions;
};

double member_gap(Archetype a, std::size_t t, std::size_t frames) {
    if (frames < 2) return kMemberGap;
    const double phase = static_cast<double>(t) / static_cast<double>(frames - 1);
    switch (a) {
        case Archetype::Converge: return kMemberGap * (1.5 - 0.5 * phase);
        case Archetype::Diverge: return kMemberGap * (1.0 + 0.5 * phase);
        default: return kMemberGap;
    }
}

std::size_t size_bucket(std::size_t size) { return size == 1 ? 0 : (size == 2 ? 1 : 2); }

std::vector<std::size_t> draw_actions(std::mt19937_64& rng, std::size_t archetype, std::size_t role) {
    const std::size_t primary = kRoles * archetype + role;
    std::vector<std::size_t> pool;
    for (std::size_t j = 0; j < kSecondaryChoices; ++j) pool.push_back(kSecondaryBase + (primary + j) % kSecondaryCount);
    std::shuffle(pool.begin(), pool.end(), rng);
    const auto extra = std::uniform_int_distribution<std::size_t>(0, 2)(rng);
    std::vector<std::size_t> actions{primary};
    actions.insert(actions.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(extra));
    std::sort(actions.begin(), actions.end());
    return actions;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    return (aa == 0 || bb == 0) ? 0.0 : ab / std::sqrt(aa * bb);
}

}  // namespace

DatasetFlavor parse_flavor(std::string_view name) {
    if (name == "grid") return DatasetFlavor::Grid;
    if (name == "cropped") return DatasetFlavor::Cropped;
    throw ConfigError("unknown dataset flavor '" + std::string(name) + "' (expected grid or cropped)");
}

std::string to_string(DatasetFlavor flavor) { return flavor == DatasetFlavor::Grid ? "grid" : "cropped"; }

void SceneSpec::validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("scene spec: " + msg); };
    if (individuals == 0) fail("needs at least one individual");
    if (groups == 0 || groups > individuals) fail("group count must be in [1, individuals]");
    if (distractors > individuals) fail("more distractors than individuals");
    if (distractors > 0 && distractors >= groups) fail("distractors need at least one host group");
    const std::size_t regular = groups - distractors;
    const std::size_t people = individuals - distractors;
    if (people < regular + (distractors > 0 ? 1 : 0)) fail("too few individuals for the regular groups");
    if (max_group_size > 0 && people > regular * max_group_size) fail("groups exceed max_group_size");
    if (frames == 0) fail("frames must be positive");
    if (grid_h == 0 || grid_w == 0) fail("grid must be non-empty");
    if (feature_dim == 0) fail("feature_dim must be positive");
    if (crop_h == 0 || crop_w == 0) fail("crop size must be positive");
    if (!(noise >= 0.0) || !std::isfinite(noise)) fail("noise must be finite and non-negative");
    if (classes.individual < kMinClassCounts.individual || classes.social < kMinClassCounts.social ||
        classes.global < kMinClassCounts.global) {
        fail("class counts below the label scheme minimum (27/7/7)");
    }
    if (!archetypes.empty() && archetypes.size() != regular) fail("archetype list must match regular group count");
}

Shape SceneSample::feature_shape() const {
    if (flavor == DatasetFlavor::Grid) return {frames, feature_dim, grid_h, grid_w};
    return {individuals(), frames, feature_dim, crop_h, crop_w};
}

Tensor SceneSample::crops() const {
    std::vector<double> v(features.begin(), features.end());
    Tensor t = Tensor::from(feature_shape(), std::move(v));
    if (flavor == DatasetFlavor::Cropped) return t;
    return roi_align(t, track, crop_h, crop_w);
}

std::vector<double> appearance(std::uint64_t prototype_seed, std::size_t feature_dim, std::size_t archetype,
                               const std::vector<std::size_t>& actions, std::size_t individual_classes) {
    if (archetype >= kArchetypeCount) throw ConfigError("archetype out of range");
    std::vector<double> v = prototype(prototype_seed, archetype, feature_dim);
    for (std::size_t c : actions) {
        if (c >= individual_classes) throw ConfigError("action class out of range");
        const auto a = prototype(prototype_seed, 1000 + c, feature_dim);
        for (std::size_t k = 0; k < feature_dim; ++k) v[k] += a[k];
    }
    return v;
}

SceneSample generate_scene(const SceneSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

    const std::size_t T = spec.frames;
    const std::size_t regular = spec.groups - spec.distractors;
    const std::size_t people = spec.individuals - spec.distractors;

    // Group sizes: one each, hosts need two, the rest spread at random.
    std::vector<std::size_t> sizes(regular, 1);
    if (spec.distractors > 0) sizes[0] = 2;
    const std::size_t cap = spec.max_group_size == 0 ? std::numeric_limits<std::size_t>::max() : spec.max_group_size;
    for (std::size_t left = people - std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}); left > 0; --left) {
        std::vector<std::size_t> open;
        for (std::size_t g = 0; g < regular; ++g) {
            if (sizes[g] < cap) open.push_back(g);
        }
        if (open.empty()) throw ConfigError("scene spec: groups exceed max_group_size");
        ++sizes[open[std::uniform_int_distribution<std::size_t>(0, open.size() - 1)(rng)]];
    }

    std::vector<Archetype> archetypes = spec.archetypes;
    if (archetypes.empty()) {
        for (std::size_t g = 0; g < regular; ++g) {
            archetypes.push_back(static_cast<Archetype>(std::uniform_int_distribution<std::size_t>(0, 3)(rng)));
        }
    }

    std::vector<Person> persons;
    std::vector<std::size_t> block_of;  // per person
    std::vector<std::vector<std::size_t>> group_members(regular);
    for (std::size_t g = 0; g < regular; ++g) {
        const Archetype a = archetypes[g];
        const double cy = uniform(0.35, 0.65);
        const double dir = unit(rng) < 0.5 ? -1.0 : 1.0;
        std::vector<double> widths(sizes[g]), heights(sizes[g]);
        for (std::size_t m = 0; m < sizes[g]; ++m) {
            widths[m] = uniform(kBoxWidth - kWidthJitter, kBoxWidth + kWidthJitter);
            heights[m] = uniform(kBoxHeight - kHeightJitter, kBoxHeight + kHeightJitter);
        }
        for (std::size_t m = 0; m < sizes[g]; ++m) {
            Person p;
            p.group = g;
            p.archetype = static_cast<std::size_t>(a);
            p.role = m % kRoles;
            p.boxes.resize(T);
            for (std::size_t t = 0; t < T; ++t) {
                const double shift = a == Archetype::Walk ? dir * kWalkSpeed * static_cast<double>(t) : 0.0;
                double x = shift;
                for (std::size_t j = 0; j < m; ++j) x += widths[j] + member_gap(a, t, T);
                const double y = cy + uniform(-kYJitter, kYJitter);
                p.boxes[t] = Box{x, y - heights[m] / 2, x + widths[m], y + heights[m] / 2};
            }
            group_members[g].push_back(persons.size());
            block_of.push_back(g);
            persons.push_back(std::move(p));
        }
    }

    // Distractors start one member gap off a host's edge and walk away from it.
    std::vector<std::array<bool, 2>> side_used(regular, {false, false});
    for (std::size_t k = 0; k < spec.distractors; ++k) {
        std::vector<std::pair<std::size_t, std::size_t>> slots;
        for (std::size_t g = 0; g < regular; ++g) {
            for (std::size_t s = 0; s < 2; ++s) {
                if (sizes[g] >= 2 && !side_used[g][s]) slots.emplace_back(g, s);
            }
        }
        if (slots.empty()) throw ConfigError("scene spec: not enough host groups for the distractors");
        const auto [host, side] = slots[std::uniform_int_distribution<std::size_t>(0, slots.size() - 1)(rng)];
        side_used[host][side] = true;
        const Person& edge = persons[side == 0 ? group_members[host].front() : group_members[host].back()];
        const double w = uniform(kBoxWidth - kWidthJitter, kBoxWidth + kWidthJitter);
        const double h = uniform(kBoxHeight - kHeightJitter, kBoxHeight + kHeightJitter);
        const double cy = edge.boxes[0].center_y();
        const double step = T > 1 ? kDistractorTravel / static_cast<double>(T - 1) : 0.0;
        Person p;
        p.group = regular + k;
        p.archetype = static_cast<std::size_t>(Archetype::Walk);
        p.distractor = true;
        p.boxes.resize(T);
        for (std::size_t t = 0; t < T; ++t) {
            const double travel = step * static_cast<double>(t);
            const double x1 = side == 0 ? edge.boxes[0].x1 - kMemberGap - w - travel
                                        : edge.boxes[0].x2 + kMemberGap + travel;
            const double y = cy + uniform(-kYJitter, kYJitter);
            p.boxes[t] = Box{x1, y - h / 2, x1 + w, y + h / 2};
        }
        block_of.push_back(host);
        persons.push_back(std::move(p));
    }

    // Lay blocks out left to right with random slack between them.
    std::vector<double> lo(regular, std::numeric_limits<double>::infinity());
    std::vector<double> hi(regular, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < persons.size(); ++i) {
        for (const Box& b : persons[i].boxes) {
            lo[block_of[i]] = std::min(lo[block_of[i]], b.x1);
            hi[block_of[i]] = std::max(hi[block_of[i]], b.x2);
        }
    }
    double used = 2 * kMargin + kBlockGap * static_cast<double>(regular - 1);
    for (std::size_t g = 0; g < regular; ++g) used += hi[g] - lo[g];
    if (used > 1.0) {
        throw DataError("overcrowded scene (seed " + std::to_string(spec.seed) + "): blocks need width " +
                        std::to_string(used) + " > 1");
    }
    std::vector<std::size_t> order(regular);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<double> slack(regular + 1);
    for (auto& s : slack) s = unit(rng) + 1e-3;
    const double slack_total = std::accumulate(slack.begin(), slack.end(), 0.0);
    std::vector<double> offset(regular);
    double cursor = kMargin;
    for (std::size_t r = 0; r < regular; ++r) {
        const std::size_t g = order[r];
        cursor += (1.0 - used) * slack[r] / slack_total;
        offset[g] = cursor - lo[g];
        cursor += (hi[g] - lo[g]) + kBlockGap;
    }
    for (std::size_t i = 0; i < persons.size(); ++i) {
        for (Box& b : persons[i].boxes) {
            b.x1 = std::clamp(b.x1 + offset[block_of[i]], 0.0, 1.0);
            b.x2 = std::clamp(b.x2 + offset[block_of[i]], 0.0, 1.0);
        }
    }

    for (Person& p : persons) p.actions = draw_actions(rng, p.archetype, p.role);

    // Present individuals in random order; group ids follow first occurrence.
    std::vector<std::size_t> perm(persons.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);

    SceneSample s;
    s.seed = spec.seed;
    s.flavor = spec.flavor;
    s.frames = T;
    s.feature_dim = spec.feature_dim;
    s.grid_h = spec.grid_h;
    s.grid_w = spec.grid_w;
    s.crop_h = spec.crop_h;
    s.crop_w = spec.crop_w;
    s.classes = spec.classes;

    const std::size_t n = persons.size();
    std::vector<Box> boxes;
    std::vector<std::size_t> remap(spec.groups, std::numeric_limits<std::size_t>::max());
    std::vector<std::size_t> raw_of_new;
    for (std::size_t i = 0; i < n; ++i) {
        const Person& p = persons[perm[i]];
        boxes.insert(boxes.end(), p.boxes.begin(), p.boxes.end());
        if (remap[p.group] == std::numeric_limits<std::size_t>::max()) {
            remap[p.group] = raw_of_new.size();
            raw_of_new.push_back(p.group);
        }
        s.groups.labels.push_back(remap[p.group]);
        s.individual_labels.push_back(p.actions);
        s.distractor.push_back(p.distractor);
    }
    s.groups.count = raw_of_new.size();
    s.track = BoxTrack(n, T, std::move(boxes));
    s.track.validate();

    std::vector<std::size_t> group_size(spec.groups, 0), group_arch(spec.groups, 0);
    for (const Person& p : persons) {
        ++group_size[p.group];
        group_arch[p.group] = p.archetype;
    }
    for (std::size_t raw : raw_of_new) {
        s.group_labels.push_back({group_arch[raw], kSizeBucketBase + size_bucket(group_size[raw])});
        s.group_archetypes.push_back(group_arch[raw]);
    }

    std::array<std::size_t, kArchetypeCount> weight{};
    for (const Person& p : persons) ++weight[p.archetype];
    const auto dominant = static_cast<std::size_t>(std::max_element(weight.begin(), weight.end()) - weight.begin());
    s.global_labels.push_back(dominant);
    if (spec.groups >= 3) s.global_labels.push_back(kManyGroupsClass);
    if (std::find(group_size.begin(), group_size.end(), std::size_t{1}) != group_size.end()) {
        s.global_labels.push_back(kSingletonClass);
    }
    if (std::all_of(group_arch.begin(), group_arch.end(), [&](std::size_t a) { return a == group_arch[0]; })) {
        s.global_labels.push_back(kUniformClass);
    }

    // Render.
    const std::size_t D = spec.feature_dim;
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<std::vector<double>> looks(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Person& p = persons[perm[i]];
        looks[i] = appearance(spec.prototype_seed, D, p.archetype, p.actions, spec.classes.individual);
    }
    auto sample = [&](double mean) { return static_cast<float>(mean + spec.noise * noise(rng)); };
    if (spec.flavor == DatasetFlavor::Cropped) {
        const std::size_t cells = spec.crop_h * spec.crop_w;
        s.features.resize(n * T * D * cells);
        float* out = s.features.data();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t t = 0; t < T; ++t) {
                for (std::size_t c = 0; c < D; ++c) {
                    for (std::size_t q = 0; q < cells; ++q) *out++ = sample(looks[i][c]);
                }
            }
        }
    } else {
        const std::size_t H = spec.grid_h, W = spec.grid_w;
        s.features.assign(T * D * H * W, 0.0f);
        auto span_of = [](double a, double b, std::size_t extent) {
            const double e = static_cast<double>(extent);
            const auto first = static_cast<std::size_t>(std::clamp(std::floor(a * e), 0.0, e - 1));
            const auto last = static_cast<std::size_t>(std::clamp(std::ceil(b * e) - 1, 0.0, e - 1));
            return std::pair{first, std::max(first, last)};
        };
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t t = 0; t < T; ++t) {
                const Box& b = s.track.at(i, t);
                const auto [r0, r1] = span_of(b.y1, b.y2, H);
                const auto [c0, c1] = span_of(b.x1, b.x2, W);
                for (std::size_t c = 0; c < D; ++c) {
                    float* plane = s.features.data() + (t * D + c) * H * W;
                    for (std::size_t r = r0; r <= r1; ++r) {
                        for (std::size_t q = c0; q <= c1; ++q) plane[r * W + q] = sample(looks[i][c]);
                    }
                }
            }
        }
    }

    // Every crop must still look like its prototype.
    const Tensor crops = s.crops();
    const std::size_t cells = spec.crop_h * spec.crop_w;
    const auto cv = crops.data();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t t = 0; t < T; ++t) {
            std::vector<double> mean(D, 0.0);
            for (std::size_t c = 0; c < D; ++c) {
                const double* cell = cv.data() + ((i * T + t) * D + c) * cells;
                for (std::size_t q = 0; q < cells; ++q) mean[c] += cell[q];
                mean[c] /= static_cast<double>(cells);
            }
            const double cs = cosine(mean, looks[i]);
            if (!(cs > kCosineFloor)) {
                throw DataError("scene seed " + std::to_string(spec.seed) + ": individual " + std::to_string(i) +
                                " frame " + std::to_string(t) + " crop cosine " + std::to_string(cs) +
                                " to its prototype is below 0.9");
            }
        }
    }
    return s;
}

std::vector<double> relation_targets(const GroupAssignment& groups) {
    const std::size_t n = groups.individuals();
    std::vector<double> r(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) r[i * n + j] = groups.labels[i] == groups.labels[j] ? 1.0 : 0.0;
    }
    return r;
}

std::vector<SceneSpec> plan_dataset(const DatasetConfig& config, std::uint64_t stream) {
    if (config.min_individuals == 0 || config.min_individuals > config.max_individuals) {
        throw ConfigError("dataset: need 1 <= min_individuals <= max_individuals");
    }
    if (!(config.distractor_rate >= 0.0 && config.distractor_rate <= 1.0)) {
        throw ConfigError("dataset: distractor_rate must be in [0,1]");
    }
    if (stream >= (1ULL << 16)) throw ConfigError("dataset: stream id out of range");
    const std::size_t cap = config.max_group_size == 0 ? config.max_individuals : config.max_group_size;
    std::vector<SceneSpec> specs;
    for (std::size_t index = 0; index < config.scenes; ++index) {
        // splitmix64 is a bijection, so distinct (stream, index) give distinct seeds.
        const std::uint64_t seed = splitmix64(config.seed ^ (stream << 48) ^ static_cast<std::uint64_t>(index));
        std::mt19937_64 rng(seed);
        SceneSpec spec = config.base;
        spec.seed = seed;
        spec.max_group_size = config.max_group_size;
        spec.archetypes.clear();
        spec.individuals =
            std::uniform_int_distribution<std::size_t>(config.min_individuals, config.max_individuals)(rng);
        const bool distractor =
            spec.individuals >= 3 && std::bernoulli_distribution(config.distractor_rate)(rng);
        spec.distractors = distractor ? 1 : 0;
        const std::size_t people = spec.individuals - spec.distractors;
        const std::size_t min_groups = (people + cap - 1) / cap;
        const std::size_t max_groups = distractor ? people - 1 : people;
        if (min_groups > max_groups) throw ConfigError("dataset: max_group_size too small for the scene sizes");
        spec.groups = std::uniform_int_distribution<std::size_t>(min_groups, max_groups)(rng) + spec.distractors;
        specs.push_back(spec);
    }
    return specs;
}

std::vector<SceneSample> generate_dataset(const DatasetConfig& config, std::uint64_t stream) {
    std::vector<SceneSample> out;
    for (const SceneSpec& spec : plan_dataset(config, stream)) out.push_back(generate_scene(spec));
    return out;
}

}  // namespace panoact
