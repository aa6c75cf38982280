// SPDX-License-Identifier: Apache-2.0

#include "runsafe/telemetry.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <fstream>

#include "runsafe/errors.hpp"

namespace runsafe {

namespace {

std::uint32_t read_le32(const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

constexpr std::array<const char*, 8> kFieldNames{
    "ground_speed", "vertical_speed", "height_agl", "distance_along_runway",
    "acceleration", "throttle",       "on_ground",  "brakes",
};

}  // namespace

ParseResult parse_datagram(std::span<const std::uint8_t> bytes) {
    ParseResult out;
    if (bytes.size() < kPrologueSize || !std::equal(kDataMagic.begin(), kDataMagic.end(), bytes.begin())) {
        out.status = ParseStatus::BadMagic;
        return out;
    }
    const auto payload = bytes.subspan(kPrologueSize);
    if (payload.size() % kRecordSize != 0) {
        out.status = ParseStatus::BadLength;
        return out;
    }
    out.records.reserve(payload.size() / kRecordSize);
    for (std::size_t off = 0; off < payload.size(); off += kRecordSize) {
        const std::uint8_t* p = payload.data() + off;
        DataRecord r;
        r.index = static_cast<std::int32_t>(read_le32(p));
        for (std::size_t k = 0; k < r.values.size(); ++k) {
            r.values[k] = std::bit_cast<float>(read_le32(p + 4 + 4 * k));
        }
        out.records.push_back(r);
    }
    return out;
}

ChannelMapping ChannelMapping::defaults() {
    ChannelMapping m;
    m.time = ChannelSlot{1, 2, 1.0};
    return m;
}

std::array<const ChannelSlot*, 8> ChannelMapping::fields() const {
    return {&ground_speed, &vertical_speed, &height_agl, &distance_along_runway,
            &acceleration, &throttle,       &on_ground,  &brakes};
}

namespace {

ChannelSlot slot_from_json(const nlohmann::json& j) {
    ChannelSlot s;
    s.index = j.at("index").get<std::int32_t>();
    s.slot = j.at("slot").get<int>();
    s.scale = j.value("scale", 1.0);
    s.offset = j.value("offset", 0.0);
    if (s.slot < 0 || s.slot > 7) {
        throw Error(ErrorCode::ConfigError, "channel slot must lie within 0..7");
    }
    return s;
}

nlohmann::json slot_to_json(const ChannelSlot& s) {
    return {{"index", s.index}, {"slot", s.slot}, {"scale", s.scale}, {"offset", s.offset}};
}

}  // namespace

void from_json(const nlohmann::json& j, ChannelMapping& m) {
    m = ChannelMapping{};
    if (j.contains("time") && !j.at("time").is_null()) m.time = slot_from_json(j.at("time"));
    m.ground_speed = slot_from_json(j.at("ground_speed"));
    m.vertical_speed = slot_from_json(j.at("vertical_speed"));
    m.height_agl = slot_from_json(j.at("height_agl"));
    m.distance_along_runway = slot_from_json(j.at("distance_along_runway"));
    m.acceleration = slot_from_json(j.at("acceleration"));
    m.throttle = slot_from_json(j.at("throttle"));
    m.on_ground = slot_from_json(j.at("on_ground"));
    m.brakes = slot_from_json(j.at("brakes"));
}

void to_json(nlohmann::json& j, const ChannelMapping& m) {
    j = nlohmann::json::object();
    j["time"] = m.time ? slot_to_json(*m.time) : nlohmann::json(nullptr);
    const auto slots = m.fields();
    for (std::size_t i = 0; i < slots.size(); ++i) {
        j[kFieldNames[i]] = slot_to_json(*slots[i]);
    }
}

ChannelMapping load_channel_mapping(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::ConfigError, "cannot open channel mapping " + path.string());
    }
    return nlohmann::json::parse(in).get<ChannelMapping>();
}

namespace {

std::optional<double> lookup(std::span<const DataRecord> records, const ChannelSlot& slot) {
    // Later records win when a datagram repeats an index.
    for (auto it = records.rbegin(); it != records.rend(); ++it) {
        if (it->index == slot.index) {
            return static_cast<double>(it->values[static_cast<std::size_t>(slot.slot)]) * slot.scale + slot.offset;
        }
    }
    return std::nullopt;
}

}  // namespace

TelemetryFrame FrameAssembler::assemble(std::span<const DataRecord> records, double arrival_time) {
    const auto slots = mapping_.fields();
    std::array<double, 8> values{};
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (auto v = lookup(records, *slots[i])) {
            values[i] = *v;
            staleness_[i] = 0;
        } else if (last_[i]) {
            values[i] = *last_[i];
            ++staleness_[i];
        } else {
            throw Error(ErrorCode::NoPriorValue,
                        std::string("channel ") + kFieldNames[i] + " missing with no prior value");
        }
    }
    for (std::size_t i = 0; i < slots.size(); ++i) last_[i] = values[i];

    TelemetryFrame f;
    f.timestamp = arrival_time;
    if (mapping_.time) {
        if (auto t = lookup(records, *mapping_.time)) f.timestamp = *t;
    }
    f.ground_speed = values[0];
    f.vertical_speed = values[1];
    f.height_agl = values[2];
    f.distance_along_runway = values[3];
    f.acceleration = values[4];
    f.throttle_fraction = values[5];
    f.on_ground = values[6] > 0.5;
    f.brakes_applied = values[7] > 0.5;
    return f;
}

TelemetryFrame assemble_frame(std::span<const DataRecord> records, const ChannelMapping& mapping,
                              double arrival_time) {
    FrameAssembler assembler(mapping);
    return assembler.assemble(records, arrival_time);
}

nlohmann::json TelemetryCounters::to_json() const {
    return {
        {"datagrams", datagrams.load()},       {"frames", frames.load()},
        {"bad_magic", bad_magic.load()},       {"bad_length", bad_length.load()},
        {"assembly_errors", assembly_errors.load()}, {"non_monotonic", non_monotonic.load()},
        {"queue_drops", queue_drops.load()},
    };
}

UdpListener::UdpListener(std::uint16_t port, ChannelMapping mapping, std::size_t capacity)
    : socket_(net::bind_udp(port)),
      port_(socket_.local_port()),
      assembler_(std::move(mapping)),
      queue_(capacity) {}

UdpListener::~UdpListener() { stop(); }

void UdpListener::start() {
    if (running_.exchange(true)) return;
    thread_ = std::thread([this] { run(); });
}

void UdpListener::stop() {
    running_ = false;
    if (thread_.joinable()) thread_.join();
}

void UdpListener::ingest(std::span<const std::uint8_t> bytes, double arrival_time) {
    ++counters_.datagrams;
    const ParseResult parsed = parse_datagram(bytes);
    if (parsed.status == ParseStatus::BadMagic) {
        ++counters_.bad_magic;
        return;
    }
    if (parsed.status == ParseStatus::BadLength) {
        ++counters_.bad_length;
        return;
    }
    TelemetryFrame frame;
    try {
        frame = assembler_.assemble(parsed.records, arrival_time);
    } catch (const Error&) {
        ++counters_.assembly_errors;
        return;
    }
    if (!std::isfinite(frame.timestamp) || (last_timestamp_ && !(frame.timestamp > *last_timestamp_))) {
        ++counters_.non_monotonic;
        return;
    }
    last_timestamp_ = frame.timestamp;
    ++counters_.frames;
    if (queue_.push(frame)) {
        ++counters_.queue_drops;
    }
}

void UdpListener::run() {
    std::vector<std::uint8_t> buffer(65536);
    const auto epoch = std::chrono::steady_clock::now();
    while (running_) {
        const auto n = net::recv_datagram(socket_, buffer, std::chrono::milliseconds(50));
        if (!n) continue;
        const double arrival =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch).count();
        ingest(std::span(buffer.data(), *n), arrival);
    }
}

}  // namespace runsafe
