// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <condition_variable>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "runsafe/dynamic_predictor.hpp"
#include "runsafe/net.hpp"
#include "runsafe/presets.hpp"
#include "runsafe/procedure_config.hpp"
#include "runsafe/procedure_fsm.hpp"
#include "runsafe/telemetry.hpp"

namespace runsafe {

inline constexpr int kSchemaVersion = 1;
/// Largest accepted length-prefixed message.
inline constexpr std::uint32_t kMaxMessageBytes = 1u << 20;

// Message builders. Every outbound message carries "type" and "v"; session
// messages also carry "seq".
nlohmann::json static_result_message(std::uint64_t seq, Procedure procedure, const DistanceBreakdown& breakdown,
                                     double runway_length);
nlohmann::json dynamic_update_message(std::uint64_t seq, const PredictionSnapshot& snapshot,
                                      std::string_view state, StatusColor color);
nlohmann::json state_change_message(std::uint64_t seq, std::string_view from, std::string_view to,
                                    std::string_view reason);
nlohmann::json error_message(ErrorCode code, std::string_view detail, const std::vector<FieldError>& fields = {});
nlohmann::json gap_message(std::uint64_t dropped);
nlohmann::json config_submit_message(Procedure procedure, const nlohmann::json& config);

nlohmann::json to_json(const PredictionSnapshot& snapshot);
PredictionSnapshot snapshot_from_json(const nlohmann::json& j);

/// One configured procedure: static result, live predictor and FSM. Not
/// thread-safe; the gateway serializes access.
class Session {
public:
    /// Throws ValidationError, or Error(InfeasibleConfig) when the static
    /// computation does not converge.
    Session(Procedure procedure, const nlohmann::json& payload, const AircraftPreset& preset = b737_800());

    Procedure procedure() const { return procedure_; }
    /// The first message of the session (seq 1).
    const nlohmann::json& static_result() const { return static_message_; }
    /// Messages caused by one frame: StateChange(s) then the DynamicUpdate.
    std::vector<nlohmann::json> on_frame(const TelemetryFrame& frame);

    std::string_view state_name() const;
    StatusColor color() const;
    /// Last StateChange emitted, if any.
    const std::optional<nlohmann::json>& last_state_change() const { return last_state_change_; }
    std::uint64_t last_seq() const { return seq_; }

private:
    void move_to(std::variant<TakeoffState, LandingState> next, std::string_view reason,
                 std::vector<nlohmann::json>& out);
    void takeoff_frame(const TelemetryFrame& frame, std::vector<nlohmann::json>& out);
    void landing_frame(const TelemetryFrame& frame, std::vector<nlohmann::json>& out);

    Procedure procedure_;
    double runway_length_ = 0.0;
    double static_total_ = 0.0;
    std::optional<TakeoffPredictor> takeoff_;
    std::optional<LandingPredictor> landing_;
    std::variant<TakeoffState, LandingState> state_;
    SeverityFilter filter_;
    std::uint64_t seq_ = 0;
    nlohmann::json static_message_;
    std::optional<nlohmann::json> last_state_change_;
};

/// Per-client outbound buffer. Overflow drops the oldest message and the
/// next pop yields a Gap notice first.
class Subscriber {
public:
    explicit Subscriber(std::size_t capacity) : capacity_(capacity) {}

    void push(nlohmann::json message);
    std::optional<nlohmann::json> pop(std::chrono::milliseconds timeout);
    void close();
    bool closed() const;
    std::uint64_t dropped() const;

private:
    std::size_t capacity_;
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::deque<nlohmann::json> items_;
    std::uint64_t pending_gap_ = 0;
    std::uint64_t dropped_total_ = 0;
    bool closed_ = false;
};

/// Fan-out of session messages to subscribers; never blocks the publisher.
class Hub {
public:
    explicit Hub(std::size_t client_capacity = 1024) : client_capacity_(client_capacity) {}

    /// New subscriber, primed with the latest StaticResult and state.
    std::shared_ptr<Subscriber> subscribe();
    void unsubscribe(const std::shared_ptr<Subscriber>& subscriber);
    void publish(const nlohmann::json& message);
    /// Forgets the replay state of the previous session.
    void reset_session();
    std::size_t subscriber_count() const;

private:
    std::size_t client_capacity_;
    mutable std::mutex mutex_;
    std::vector<std::shared_ptr<Subscriber>> subscribers_;
    std::optional<nlohmann::json> latest_static_;
    std::optional<nlohmann::json> latest_state_;
};

/// 4-byte big-endian length then UTF-8 JSON.
bool write_message(const net::Socket& socket, const nlohmann::json& message);
/// Raw payload of one message; nullopt on timeout, EOF or oversize.
std::optional<std::string> read_frame(const net::Socket& socket, std::chrono::milliseconds timeout);
/// nullopt on timeout, EOF, oversize or malformed JSON.
std::optional<nlohmann::json> read_message(const net::Socket& socket, std::chrono::milliseconds timeout);

struct GatewayOptions {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;          // message channel; 0 = ephemeral
    std::uint16_t udp_port = 49000;  // telemetry; 0 = ephemeral
    std::optional<std::uint16_t> health_port;  // HTTP GET /health; 0 = ephemeral
    std::size_t client_capacity = 1024;
    std::size_t frame_queue_capacity = UdpListener::kQueueCapacity;
    ChannelMapping mapping = ChannelMapping::defaults();
    AircraftPreset preset = b737_800();
};

/// Telemetry listener, pipeline thread, client channel and health endpoint.
class Gateway {
public:
    explicit Gateway(GatewayOptions options);
    ~Gateway();
    Gateway(const Gateway&) = delete;
    Gateway& operator=(const Gateway&) = delete;

    void start();
    void stop();

    std::uint16_t port() const { return port_; }
    std::uint16_t udp_port() const { return listener_.port(); }
    std::uint16_t health_port() const { return health_port_; }

    /// Handles a ConfigSubmit. Returns the StaticResult (also broadcast) or
    /// an Error message for the caller alone.
    nlohmann::json submit(const nlohmann::json& message);
    nlohmann::json health() const;
    Hub& hub() { return hub_; }

private:
    struct Client;

    void accept_loop();
    void pipeline_loop();
    void client_reader(std::shared_ptr<Client> client);
    void client_writer(std::shared_ptr<Client> client);
    void reap_clients();

    GatewayOptions options_;
    UdpListener listener_;
    net::Socket tcp_listener_;
    std::uint16_t port_ = 0;
    std::uint16_t health_port_ = 0;
    Hub hub_;

    mutable std::mutex session_mutex_;
    std::unique_ptr<Session> session_;
    std::atomic<std::uint64_t> frames_processed_{0};
    std::atomic<std::int64_t> pipeline_heartbeat_ns_{0};

    std::atomic<bool> running_{false};
    std::thread accept_thread_;
    std::thread pipeline_thread_;
    std::mutex clients_mutex_;
    std::vector<std::shared_ptr<Client>> clients_;
    struct HealthServer;
    std::unique_ptr<HealthServer> health_server_;
};

}  // namespace runsafe
