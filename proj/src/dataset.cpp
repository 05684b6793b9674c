#include "reach/dataset.hpp"

#include <charconv>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "reach/binary_io.hpp"
#include "reach/error.hpp"

namespace reach {

namespace {

constexpr const char* kDatasetFormat = "reach-dataset";
constexpr int kDatasetVersion = 1;

std::uniform_real_distribution<double> uniform(const JointLimit& lim) { return std::uniform_real_distribution<double>(lim.min, lim.max); }

void append(std::vector<double>& row, std::span<const double> values) {
    row.insert(row.end(), values.begin(), values.end());
}

} // namespace

ArmAngles random_arm_pose(const KinematicModel& model, const RobotState& state, std::mt19937_64& rng) {
    ArmAngles q{};
    for (std::size_t j = 0; j < kArmJoints; ++j) {
        auto dist = uniform(model.arm_limits[j]);
        const double v = dist(rng);  // always drawn, so locks do not shift the random stream
        q[j] = state.arm_locked[j] ? state.arm_lock_values[j] : v;
    }
    return q;
}

GazeDataset gen_gaze_dataset(const KinematicModel& model, const BabbleConfig& config, std::uint64_t seed) {
    if (config.iterations < 0 || config.gaze_interpolation < 0) throw InvalidArgument("negative babble counts");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> depth(config.target_min_depth, config.target_max_depth);
    std::uniform_real_distribution<double> delta(-config.head_amplitude_deg, config.head_amplitude_deg);

    GazeDataset out;
    RobotState state;
    const int steps = config.gaze_interpolation + 1;
    for (int it = 0; it < config.iterations; ++it) {
        // Place the target on the current optical axis.
        const auto cam = camera_pose(model, state.head);
        const Eigen::Vector3d target_pos = cam.translation() + cam.linear().col(0) * depth(rng);
        const Target target{target_pos, model.ball_radius};

        const HeadAngles command{delta(rng), delta(rng)};
        const RobotState moved = apply_motor(model, state, JointGroup::Head, command, CommandMode::Relative).state;
        const HeadAngles executed{moved.head[0] - state.head[0], moved.head[1] - state.head[1]};

        // Interpolate along the executed move; the last point is the move itself.
        for (int j = 1; j <= steps; ++j) {
            const double t = static_cast<double>(j) / steps;
            RobotState probe = state;
            probe.head = {state.head[0] + t * executed[0], state.head[1] + t * executed[1]};
            const Percept p = perceive_target(model, probe, target);
            if (!p.visible()) {
                ++out.discarded;
                continue;
            }
            out.samples.push_back({*p.centroid, {-t * executed[0], -t * executed[1]}});
            out.replay.push_back({probe.head, target_pos});
        }
        state = moved;
    }
    return out;
}

std::vector<ArmSample> gen_arm_dataset(const KinematicModel& model, const BabbleConfig& config, std::uint64_t seed) {
    if (config.iterations < 0 || config.arm_interpolation < 0) throw InvalidArgument("negative babble counts");
    std::mt19937_64 rng(seed);
    std::vector<ArmSample> out;
    RobotState state;
    const int steps = config.arm_interpolation + 1;
    out.reserve(static_cast<std::size_t>(config.iterations * steps));
    for (int it = 0; it < config.iterations; ++it) {
        const ArmAngles next = random_arm_pose(model, state, rng);
        // Sample the joint-space path from the previous pose; FK is evaluated
        // at every interpolated configuration.
        for (int j = 1; j <= steps; ++j) {
            const double t = static_cast<double>(j) / steps;
            ArmAngles q{};
            for (std::size_t k = 0; k < kArmJoints; ++k) q[k] = state.arm[k] + t * (next[k] - state.arm[k]);
            if (j == steps) q = next;
            out.push_back({forward_kinematics(model, q), q});
        }
        state.arm = next;
    }
    return out;
}

EyeHandDataset gen_eyehand_dataset(const KinematicModel& model, const BabbleConfig& config,
                                   const GazeController& gaze, std::uint64_t seed, const RobotState& initial) {
    if (config.iterations < 0) throw InvalidArgument("negative iteration count");
    std::mt19937_64 rng(seed);
    EyeHandDataset out;
    RobotState state = initial;
    for (int it = 0; it < config.iterations; ++it) {
        const ArmAngles q = random_arm_pose(model, state, rng);
        state = apply_motor(model, state, JointGroup::Arm, q, CommandMode::Absolute).state;
        const Target ball = place_ball_in_hand(model, state);

        if (!perceive_target(model, state, ball).visible()) {
            const auto found = scan_for_target(model, state, ball);
            if (!found) {
                ++out.cancelled;
                continue;
            }
            state = found->state;
        }

        CenteringResult centred;
        try {
            centred = center_gaze(model, state, ball, gaze, config.tolerance_px, config.max_gaze_steps);
        } catch (const NoAssociationError&) {
            ++out.cancelled;
            continue;
        }
        state = centred.state;
        if (!centred.centered) {
            ++out.cancelled;
            continue;
        }
        out.triplets.push_back({forward_kinematics(model, state.arm), state.arm, state.head, centred.pixel_error});
    }
    return out;
}

EyeHandDataset gen_envchange_dataset(const KinematicModel& model, const BabbleConfig& config,
                                     const GazeController& gaze, std::uint64_t seed) {
    RobotState locked;
    locked.lock_arm_joint(kUpperArmRotation, 0.0);
    return gen_eyehand_dataset(model, config, gaze, seed, locked);
}

// --- Persistence -----------------------------------------------------------

VectorSet Dataset::field(const std::string& name) const {
    int offset = 0;
    for (const auto& f : fields) {
        if (f.name == name) {
            VectorSet out(f.dim);
            out.reserve(rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i)
                out.push_back(rows[i].subspan(static_cast<std::size_t>(offset), static_cast<std::size_t>(f.dim)));
            return out;
        }
        offset += f.dim;
    }
    throw InvalidArgument("dataset has no field '" + name + "'");
}

void write_dataset(std::ostream& out, const Dataset& data) {
    nlohmann::ordered_json header;
    header["format"] = kDatasetFormat;
    header["version"] = kDatasetVersion;
    header["modality"] = data.modality;
    header["records"] = data.rows.size();
    auto& fields = header["fields"] = nlohmann::ordered_json::array();
    for (const auto& f : data.fields) fields.push_back({{"name", f.name}, {"units", f.units}, {"dim", f.dim}});
    out << '#' << header.dump() << '\n';

    char buf[64];
    for (std::size_t i = 0; i < data.rows.size(); ++i) {
        const auto row = data.rows[i];
        for (std::size_t k = 0; k < row.size(); ++k) {
            const auto res = std::to_chars(buf, buf + sizeof buf, row[k]);
            if (k) out << ' ';
            out.write(buf, res.ptr - buf);
        }
        out << '\n';
    }
    if (!out) throw FormatError("failed to write dataset");
}

Dataset read_dataset(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.empty() || line[0] != '#') throw FormatError("missing dataset header");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line.substr(1));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("bad dataset header: ") + e.what());
    }
    if (header.value("format", "") != kDatasetFormat || header.value("version", 0) != kDatasetVersion)
        throw FormatError("unsupported dataset format");

    Dataset data;
    data.modality = header.at("modality").get<std::string>();
    int width = 0;
    for (const auto& f : header.at("fields")) {
        FieldSpec field{f.at("name").get<std::string>(), f.at("units").get<std::string>(), f.at("dim").get<int>()};
        if (field.dim <= 0) throw FormatError("field dimension must be positive");
        width += field.dim;
        data.fields.push_back(std::move(field));
    }
    if (width == 0) throw FormatError("dataset has no fields");
    data.rows = VectorSet(width);

    std::vector<double> row(static_cast<std::size_t>(width));
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const char* p = line.data();
        const char* end = p + line.size();
        for (auto& v : row) {
            while (p < end && *p == ' ') ++p;
            const auto res = std::from_chars(p, end, v);
            if (res.ec != std::errc()) throw FormatError("malformed dataset record");
            p = res.ptr;
        }
        while (p < end && *p == ' ') ++p;
        if (p != end) throw FormatError("dataset record has extra values");
        data.rows.push_back(row);
    }
    if (header.contains("records") && header["records"].get<std::size_t>() != data.rows.size())
        throw FormatError("dataset record count mismatch");
    return data;
}

void write_dataset(const std::string& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    write_dataset(out, data);
}

Dataset read_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path);
    return read_dataset(in);
}

std::string dataset_digest(const Dataset& data) {
    std::ostringstream s;
    write_dataset(s, data);
    return io::hex_digest(io::fnv1a(s.str()));
}

Dataset to_dataset(const std::vector<GazeSample>& samples) {
    Dataset d{"gaze", {{"s_head", "px", 2}, {"m_delta_head_inv", "deg", 2}}, VectorSet(4)};
    d.rows.reserve(samples.size());
    for (const auto& s : samples) d.rows.push_back(std::vector<double>{s.s_head.x(), s.s_head.y(),
                                                                       s.m_delta_head_inv[0], s.m_delta_head_inv[1]});
    return d;
}

Dataset to_dataset(const std::vector<ArmSample>& samples) {
    Dataset d{"arm", {{"s_arm", "cm", 3}, {"m_arm", "deg", 4}}, VectorSet(7)};
    d.rows.reserve(samples.size());
    std::vector<double> row;
    for (const auto& s : samples) {
        row.assign(s.s_arm.data(), s.s_arm.data() + 3);
        append(row, s.m_arm);
        d.rows.push_back(row);
    }
    return d;
}

Dataset to_dataset(const std::vector<EyeHandTriplet>& triplets, const std::string& modality) {
    Dataset d{modality,
              {{"s_arm", "cm", 3}, {"m_arm", "deg", 4}, {"m_head", "deg", 2}, {"centroid_error", "px", 1}},
              VectorSet(10)};
    d.rows.reserve(triplets.size());
    std::vector<double> row;
    for (const auto& t : triplets) {
        row.assign(t.s_arm.data(), t.s_arm.data() + 3);
        append(row, t.m_arm);
        append(row, t.m_head);
        row.push_back(t.centroid_error);
        d.rows.push_back(row);
    }
    return d;
}

std::vector<GazeSample> gaze_samples(const Dataset& data) {
    const auto s = data.field("s_head");
    const auto m = data.field("m_delta_head_inv");
    std::vector<GazeSample> out;
    for (std::size_t i = 0; i < s.size(); ++i) out.push_back({{s[i][0], s[i][1]}, {m[i][0], m[i][1]}});
    return out;
}

std::vector<ArmSample> arm_samples(const Dataset& data) {
    const auto s = data.field("s_arm");
    const auto m = data.field("m_arm");
    std::vector<ArmSample> out;
    for (std::size_t i = 0; i < s.size(); ++i)
        out.push_back({{s[i][0], s[i][1], s[i][2]}, {m[i][0], m[i][1], m[i][2], m[i][3]}});
    return out;
}

std::vector<EyeHandTriplet> eyehand_triplets(const Dataset& data) {
    const auto s = data.field("s_arm");
    const auto m = data.field("m_arm");
    const auto h = data.field("m_head");
    const auto e = data.field("centroid_error");
    std::vector<EyeHandTriplet> out;
    for (std::size_t i = 0; i < s.size(); ++i)
        out.push_back({{s[i][0], s[i][1], s[i][2]}, {m[i][0], m[i][1], m[i][2], m[i][3]}, {h[i][0], h[i][1]}, e[i][0]});
    return out;
}

} // namespace reach
