// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "runsafe/bounded_queue.hpp"
#include "runsafe/frame.hpp"
#include "runsafe/net.hpp"

namespace runsafe {

inline constexpr std::size_t kPrologueSize = 5;
inline constexpr std::size_t kRecordSize = 36;
inline constexpr std::array<std::uint8_t, 4> kDataMagic{0x44, 0x41, 0x54, 0x41};  // "DATA"

/// One 36-byte simulator data record: channel index plus eight values.
struct DataRecord {
    std::int32_t index = 0;
    std::array<float, 8> values{};
};

enum class ParseStatus { Ok, BadMagic, BadLength };

struct ParseResult {
    ParseStatus status = ParseStatus::Ok;
    std::vector<DataRecord> records;
};

/// Decodes "DATA" + pad byte + N little-endian records. Never throws; malformed
/// input is reported through `status` with no records.
ParseResult parse_datagram(std::span<const std::uint8_t> bytes);

/// Source of one frame field: record index, value slot and a linear unit
/// conversion (SI = raw * scale + offset).
struct ChannelSlot {
    std::int32_t index = 0;
    int slot = 0;
    double scale = 1.0;
    double offset = 0.0;
};

inline constexpr double kKnotsToMps = 0.514444;
inline constexpr double kFpmToMps = 0.3048 / 60.0;

struct ChannelMapping {
    std::optional<ChannelSlot> time;  // frame timestamp; arrival time when absent
    ChannelSlot ground_speed{3, 3, kKnotsToMps};
    ChannelSlot vertical_speed{4, 2, kFpmToMps};
    ChannelSlot height_agl{20, 3, 0.3048};
    ChannelSlot distance_along_runway{21, 6, 0.3048};
    ChannelSlot acceleration{4, 5, 9.80665};
    ChannelSlot throttle{26, 0, 1.0};
    ChannelSlot on_ground{20, 4, 1.0};
    ChannelSlot brakes{14, 1, 1.0};

    /// Default simulator data-output layout, with mission time in record 1.
    static ChannelMapping defaults();

    /// The slots in frame-field order, for iteration.
    std::array<const ChannelSlot*, 8> fields() const;
};

void from_json(const nlohmann::json& j, ChannelMapping& mapping);
void to_json(nlohmann::json& j, const ChannelMapping& mapping);
ChannelMapping load_channel_mapping(const std::filesystem::path& path);

/// Turns record sets into frames, carrying missing channels forward.
class FrameAssembler {
public:
    explicit FrameAssembler(ChannelMapping mapping) : mapping_(std::move(mapping)) {}

    /// Throws NoPriorValue when a mapped channel is absent and was never seen.
    TelemetryFrame assemble(std::span<const DataRecord> records, double arrival_time);

    /// Consecutive frames for which each field (frame-field order) was carried forward.
    const std::array<std::uint32_t, 8>& staleness() const { return staleness_; }
    const ChannelMapping& mapping() const { return mapping_; }

private:
    ChannelMapping mapping_;
    std::array<std::optional<double>, 8> last_{};
    std::array<std::uint32_t, 8> staleness_{};
};

TelemetryFrame assemble_frame(std::span<const DataRecord> records, const ChannelMapping& mapping,
                              double arrival_time);

struct TelemetryCounters {
    std::atomic<std::uint64_t> datagrams{0};
    std::atomic<std::uint64_t> frames{0};
    std::atomic<std::uint64_t> bad_magic{0};
    std::atomic<std::uint64_t> bad_length{0};
    std::atomic<std::uint64_t> assembly_errors{0};
    std::atomic<std::uint64_t> non_monotonic{0};
    std::atomic<std::uint64_t> queue_drops{0};

    nlohmann::json to_json() const;
};

/// Receives datagrams on its own thread and hands assembled frames to a
/// bounded drop-oldest queue.
class UdpListener {
public:
    static constexpr std::size_t kQueueCapacity = 64;

    /// Binds immediately; throws BindFailure. Port 0 picks an ephemeral port.
    UdpListener(std::uint16_t port, ChannelMapping mapping, std::size_t capacity = kQueueCapacity);
    ~UdpListener();
    UdpListener(const UdpListener&) = delete;
    UdpListener& operator=(const UdpListener&) = delete;

    void start();
    void stop();

    std::uint16_t port() const { return port_; }
    BoundedQueue<TelemetryFrame>& frames() { return queue_; }
    const TelemetryCounters& counters() const { return counters_; }

    /// Processes one datagram synchronously (what the receive thread does).
    void ingest(std::span<const std::uint8_t> bytes, double arrival_time);

private:
    void run();

    net::Socket socket_;
    std::uint16_t port_ = 0;
    FrameAssembler assembler_;
    BoundedQueue<TelemetryFrame> queue_;
    TelemetryCounters counters_;
    std::optional<double> last_timestamp_;
    std::atomic<bool> running_{false};
    std::thread thread_;
};

}  // namespace runsafe
