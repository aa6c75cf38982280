// SPDX-License-Identifier: Apache-2.0
// Helpers shared by the gateway tests and the acceptance binary.

#pragma once

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "runsafe/flight_sim.hpp"
#include "runsafe/gateway.hpp"
#include "runsafe/net.hpp"

namespace support {

/// ConfigSubmit body matching what the scenario simulates.
inline nlohmann::json takeoff_payload(const runsafe::Scenario& s, double reaction_time = 0.0) {
    runsafe::TakeoffRequest r{s.takeoff, {}};
    r.integrator.reaction_time_at_v1 = reaction_time;
    return runsafe::to_json(r);
}

inline nlohmann::json landing_payload(const runsafe::Scenario& s) { return runsafe::to_json(s.landing); }

/// Blocking message-channel client.
class Client {
public:
    explicit Client(std::uint16_t port) : socket_(runsafe::net::connect_tcp("127.0.0.1", port)) {}

    bool send(const nlohmann::json& m) { return runsafe::write_message(socket_, m); }

    std::optional<nlohmann::json> next(std::chrono::milliseconds timeout = std::chrono::seconds(5)) {
        return runsafe::read_message(socket_, timeout);
    }

    /// Reads until `done` accepts a message or `timeout` passes; returns all
    /// messages read, the accepted one last.
    std::vector<nlohmann::json> read_until(const std::function<bool(const nlohmann::json&)>& done,
                                           std::chrono::milliseconds timeout) {
        std::vector<nlohmann::json> out;
        const auto deadline = std::chrono::steady_clock::now() + timeout;
        while (std::chrono::steady_clock::now() < deadline) {
            auto m = next(std::chrono::milliseconds(200));
            if (!m) continue;
            out.push_back(*m);
            if (done(out.back())) break;
        }
        return out;
    }

    const runsafe::net::Socket& socket() const { return socket_; }

private:
    runsafe::net::Socket socket_;
};

inline bool is_state_change_to(const nlohmann::json& m, std::string_view to) {
    return m.value("type", std::string()) == "StateChange" && m.value("to", std::string()) == to;
}

}  // namespace support
