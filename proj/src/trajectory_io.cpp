#include "nns/trajectory_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string_view>

#include "nns/error.hpp"

namespace nns {

std::string format_number(double value)
{
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, result.ptr);
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::io, "cannot open '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorKind::io, "cannot write '" + path.string() + "'");
    }
    out << text;
    if (!out) {
        throw Error(ErrorKind::io, "failed writing '" + path.string() + "'");
    }
}

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return fields;
}

std::string at_line(int line) { return "line " + std::to_string(line) + ": "; }

double parse_double(std::string_view field, int line, const char* name)
{
    double value = 0.0;
    const auto result = std::from_chars(field.data(), field.data() + field.size(), value);
    if (result.ec != std::errc() || result.ptr != field.data() + field.size() || !std::isfinite(value)) {
        throw Error(ErrorKind::parse, at_line(line) + name + " '" + std::string(field) +
                                          "' is not a finite number");
    }
    return value;
}

long long parse_integer(std::string_view field, int line, const char* name)
{
    long long value = 0;
    const auto result = std::from_chars(field.data(), field.data() + field.size(), value);
    if (result.ec != std::errc() || result.ptr != field.data() + field.size()) {
        throw Error(ErrorKind::parse,
                    at_line(line) + name + " '" + std::string(field) + "' is not an integer");
    }
    return value;
}

struct Row {
    int line;
    long long frame;
    double timestamp;
    int landmark;
    std::vector<double> values;
};

/// Shared reader for the two landmark CSV layouts: header check, metadata
/// comments, per-row field parsing and (frame, landmark) uniqueness.
struct TableReader {
    std::vector<std::string> required;
    std::size_t optional_fields = 0;

    std::map<std::string, std::string> metadata;
    std::vector<Row> rows;

    void read(const std::string& text)
    {
        std::istringstream in(text);
        std::string raw;
        int line = 0;
        bool header_seen = false;
        std::set<std::pair<long long, int>> seen;
        while (std::getline(in, raw)) {
            ++line;
            const std::string_view content = trim(raw);
            if (content.empty()) {
                continue;
            }
            if (content.front() == '#') {
                const std::string_view body = trim(content.substr(1));
                const auto colon = body.find(':');
                if (colon != std::string_view::npos && colon > 0) {
                    metadata[std::string(trim(body.substr(0, colon)))] =
                        std::string(trim(body.substr(colon + 1)));
                }
                continue;
            }
            const auto fields = split_fields(content);
            if (!header_seen) {
                if (fields.size() < required.size()) {
                    throw Error(ErrorKind::format, at_line(line) + "expected header starting with '" +
                                                       required.front() + "'");
                }
                for (std::size_t i = 0; i < required.size(); ++i) {
                    if (fields[i] != required[i]) {
                        throw Error(ErrorKind::format, at_line(line) + "header column " +
                                                           std::to_string(i + 1) + " must be '" +
                                                           required[i] + "', got '" +
                                                           std::string(fields[i]) + "'");
                    }
                }
                header_seen = true;
                continue;
            }
            if (fields.size() != required.size() && fields.size() != required.size() + optional_fields) {
                throw Error(ErrorKind::format, at_line(line) + "expected " +
                                                   std::to_string(required.size()) + " fields, got " +
                                                   std::to_string(fields.size()));
            }
            Row row;
            row.line = line;
            row.frame = parse_integer(fields[0], line, "frame_index");
            if (row.frame < 0 || row.frame > std::numeric_limits<int>::max()) {
                throw Error(ErrorKind::range, at_line(line) + "frame_index out of range");
            }
            row.timestamp = parse_double(fields[1], line, "timestamp_s");
            const long long landmark = parse_integer(fields[2], line, "landmark_id");
            if (landmark < 0 || landmark >= kNumLandmarks) {
                throw Error(ErrorKind::range, at_line(line) + "landmark_id " + std::to_string(landmark) +
                                                  " outside 0..67");
            }
            row.landmark = static_cast<int>(landmark);
            for (std::size_t i = 3; i < fields.size(); ++i) {
                const char* name = i < required.size() ? required[i].c_str() : "confidence";
                row.values.push_back(parse_double(fields[i], line, name));
            }
            if (!seen.insert({row.frame, row.landmark}).second) {
                throw Error(ErrorKind::format, at_line(line) + "duplicate row for frame " +
                                                   std::to_string(row.frame) + ", landmark " +
                                                   std::to_string(row.landmark));
            }
            rows.push_back(std::move(row));
        }
        if (!header_seen) {
            throw Error(ErrorKind::format, "missing header line");
        }
    }

    /// Rows grouped by frame, frames sorted by index, timestamps checked.
    std::map<long long, std::vector<const Row*>> frames() const
    {
        std::map<long long, std::vector<const Row*>> grouped;
        for (const auto& r : rows) {
            auto& group = grouped[r.frame];
            if (!group.empty() && group.front()->timestamp != r.timestamp) {
                throw Error(ErrorKind::format, at_line(r.line) + "frame " + std::to_string(r.frame) +
                                                   " has conflicting timestamps");
            }
            group.push_back(&r);
        }
        const Row* previous = nullptr;
        for (const auto& [frame, group] : grouped) {
            if (previous != nullptr && !(group.front()->timestamp > previous->timestamp)) {
                throw Error(ErrorKind::ordering, at_line(group.front()->line) + "timestamp of frame " +
                                                     std::to_string(frame) +
                                                     " does not increase over frame " +
                                                     std::to_string(previous->frame));
            }
            previous = group.front();
        }
        return grouped;
    }
};

void write_metadata(std::ostringstream& out, const std::map<std::string, std::string>& metadata)
{
    for (const auto& [key, value] : metadata) {
        out << "# " << key << ": " << value << '\n';
    }
}

} // namespace

TrajectorySession parse_trajectory_text(const std::string& text)
{
    TableReader reader;
    reader.required = {"frame_index", "timestamp_s", "landmark_id", "x_px", "y_px"};
    reader.optional_fields = 1;
    reader.read(text);
    const auto grouped = reader.frames();
    if (grouped.size() < 2) {
        throw Error(ErrorKind::format, "trajectory needs at least 2 frames, found " +
                                           std::to_string(grouped.size()));
    }

    TrajectorySession session;
    session.metadata = reader.metadata;
    if (const auto it = session.metadata.find("source_id"); it != session.metadata.end()) {
        session.source_id = it->second;
    }
    if (const auto it = session.metadata.find("sample_rate_hint"); it != session.metadata.end()) {
        const double rate = parse_double(it->second, 0, "sample_rate_hint");
        if (!(rate > 0.0)) {
            throw Error(ErrorKind::range, "sample_rate_hint must be positive");
        }
        session.sample_rate_hint = rate;
    }
    for (const auto& [frame_index, group] : grouped) {
        LandmarkFrame frame;
        frame.frame_index = static_cast<int>(frame_index);
        frame.timestamp = group.front()->timestamp;
        const bool any_confidence =
            std::any_of(group.begin(), group.end(), [](const Row* r) { return r->values.size() == 3; });
        if (any_confidence) {
            frame.confidence.emplace();
            frame.confidence->fill(0.0);
        }
        for (const Row* r : group) {
            frame.points[r->landmark] = {r->values[0], r->values[1]};
            frame.valid[r->landmark] = true;
            if (any_confidence) {
                const double c = r->values.size() == 3 ? r->values[2] : 1.0;
                if (c < 0.0 || c > 1.0) {
                    throw Error(ErrorKind::range, at_line(r->line) + "confidence " + format_number(c) +
                                                      " outside [0, 1]");
                }
                (*frame.confidence)[r->landmark] = c;
            }
        }
        session.frames.push_back(frame);
    }
    return session;
}

TrajectorySession parse_trajectory(const std::filesystem::path& path)
{
    return parse_trajectory_text(read_text_file(path));
}

std::string format_trajectory(const TrajectorySession& session)
{
    std::ostringstream out;
    auto metadata = session.metadata;
    if (!session.source_id.empty()) {
        metadata["source_id"] = session.source_id;
    }
    if (session.sample_rate_hint) {
        metadata["sample_rate_hint"] = format_number(*session.sample_rate_hint);
    }
    write_metadata(out, metadata);
    const bool with_confidence = std::any_of(session.frames.begin(), session.frames.end(),
                                             [](const LandmarkFrame& f) { return f.confidence.has_value(); });
    out << "frame_index,timestamp_s,landmark_id,x_px,y_px" << (with_confidence ? ",confidence" : "") << '\n';
    for (const auto& f : session.frames) {
        for (int j = 0; j < kNumLandmarks; ++j) {
            if (!f.valid[j]) {
                continue;
            }
            out << f.frame_index << ',' << format_number(f.timestamp) << ',' << j << ','
                << format_number(f.points[j].x()) << ',' << format_number(f.points[j].y());
            if (with_confidence) {
                out << ',' << format_number(f.confidence ? (*f.confidence)[j] : 1.0);
            }
            out << '\n';
        }
    }
    return out.str();
}

void write_trajectory(const TrajectorySession& session, const std::filesystem::path& path)
{
    write_text_file(path, format_trajectory(session));
}

std::string format_landmarks3d(std::span<const FrontalizedFrame> frames,
                               const std::map<std::string, std::string>& metadata)
{
    std::ostringstream out;
    auto meta = metadata;
    meta["units"] = "model";
    write_metadata(out, meta);
    out << "frame_index,timestamp_s,landmark_id,x,y,z\n";
    for (const auto& f : frames) {
        if (!f.landmarks) {
            continue;
        }
        for (int j = 0; j < kNumLandmarks; ++j) {
            const auto& p = f.landmarks->points[j];
            out << f.frame_index << ',' << format_number(f.timestamp) << ',' << j << ','
                << format_number(p.x()) << ',' << format_number(p.y()) << ',' << format_number(p.z()) << '\n';
        }
    }
    return out.str();
}

void write_landmarks3d(std::span<const FrontalizedFrame> frames, const std::filesystem::path& path,
                       const std::map<std::string, std::string>& metadata)
{
    write_text_file(path, format_landmarks3d(frames, metadata));
}

std::vector<FrontalizedFrame> parse_landmarks3d_text(const std::string& text,
                                                     std::map<std::string, std::string>* metadata)
{
    TableReader reader;
    reader.required = {"frame_index", "timestamp_s", "landmark_id", "x", "y", "z"};
    reader.read(text);
    if (metadata != nullptr) {
        *metadata = reader.metadata;
    }
    std::vector<FrontalizedFrame> frames;
    for (const auto& [frame_index, group] : reader.frames()) {
        if (group.size() != kNumLandmarks) {
            throw Error(ErrorKind::format, at_line(group.front()->line) + "frame " +
                                               std::to_string(frame_index) + " has " +
                                               std::to_string(group.size()) + " landmarks, expected 68");
        }
        FrontalizedFrame f;
        f.frame_index = static_cast<int>(frame_index);
        f.timestamp = group.front()->timestamp;
        f.landmarks.emplace();
        f.landmarks->frame_index = f.frame_index;
        for (const Row* r : group) {
            f.landmarks->points[r->landmark] = {r->values[0], r->values[1], r->values[2]};
        }
        frames.push_back(std::move(f));
    }
    return frames;
}

std::vector<FrontalizedFrame> parse_landmarks3d(const std::filesystem::path& path,
                                                std::map<std::string, std::string>* metadata)
{
    return parse_landmarks3d_text(read_text_file(path), metadata);
}

std::map<std::string, std::string> landmark_metadata(const TrajectorySession& session)
{
    std::map<std::string, std::string> metadata;
    if (!session.source_id.empty()) {
        metadata["source_id"] = session.source_id;
    }
    if (session.sample_rate_hint) {
        metadata["sample_rate_hint"] = format_number(*session.sample_rate_hint);
    }
    return metadata;
}

} // namespace nns
