// SPDX-License-Identifier: Apache-2.0

#include "runsafe/gateway.hpp"

#include <sys/socket.h>

#include <algorithm>
#include <array>

#include <httplib.h>

namespace runsafe {

namespace {

nlohmann::json envelope(std::string_view type) { return {{"type", std::string(type)}, {"v", kSchemaVersion}}; }

std::int64_t now_ns() {
    return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace

nlohmann::json to_json(const PredictionSnapshot& s) {
    return {
        {"timestamp", s.timestamp},
        {"procedure_stage", std::string(to_string(s.procedure_stage))},
        {"dynamic_required_distance", s.dynamic_required_distance},
        {"stop_position", s.stop_position},
        {"stop_margin", s.stop_margin},
        {"delta_from_static", s.delta_from_static},
        {"static_reference", s.static_reference},
        {"bdr", s.bdr},
        {"position", s.position},
        {"ground_speed", s.ground_speed},
        {"confidence", std::string(to_string(s.confidence))},
        {"target_unreachable", s.target_unreachable},
    };
}

PredictionSnapshot snapshot_from_json(const nlohmann::json& j) {
    PredictionSnapshot s;
    s.timestamp = j.at("timestamp").get<double>();
    const auto stage = j.at("procedure_stage").get<std::string>();
    for (auto candidate : {ProcedureStage::TakeoffRoll, ProcedureStage::RtoBraking, ProcedureStage::PreApproach,
                           ProcedureStage::Approach, ProcedureStage::Flare, ProcedureStage::FreeRoll,
                           ProcedureStage::LandingBraking}) {
        if (to_string(candidate) == stage) s.procedure_stage = candidate;
    }
    s.dynamic_required_distance = j.at("dynamic_required_distance").get<double>();
    s.stop_position = j.at("stop_position").get<double>();
    s.stop_margin = j.at("stop_margin").get<double>();
    s.delta_from_static = j.at("delta_from_static").get<double>();
    s.static_reference = j.at("static_reference").get<double>();
    s.bdr = j.at("bdr").get<double>();
    s.position = j.at("position").get<double>();
    s.ground_speed = j.at("ground_speed").get<double>();
    const auto confidence = j.at("confidence").get<std::string>();
    for (auto candidate : {Confidence::Seeding, Confidence::Converging, Confidence::Converged}) {
        if (to_string(candidate) == confidence) s.confidence = candidate;
    }
    s.target_unreachable = j.at("target_unreachable").get<bool>();
    return s;
}

nlohmann::json static_result_message(std::uint64_t seq, Procedure procedure, const DistanceBreakdown& breakdown,
                                     double runway_length) {
    nlohmann::json m = envelope("StaticResult");
    m["seq"] = seq;
    m["procedure"] = std::string(to_string(procedure));
    nlohmann::json segments = nlohmann::json::array();
    for (const auto& s : breakdown.segments) segments.push_back({{"label", s.label}, {"distance", s.distance}});
    m["segments"] = segments;
    m["total"] = breakdown.total;
    m["runway_length"] = runway_length;
    m["runway_exceeded"] = breakdown.runway_exceeded;
    return m;
}

nlohmann::json dynamic_update_message(std::uint64_t seq, const PredictionSnapshot& snapshot, std::string_view state,
                                      StatusColor color) {
    nlohmann::json m = envelope("DynamicUpdate");
    m["seq"] = seq;
    m["snapshot"] = to_json(snapshot);
    m["state"] = std::string(state);
    m["color"] = std::string(to_string(color));
    return m;
}

nlohmann::json state_change_message(std::uint64_t seq, std::string_view from, std::string_view to,
                                    std::string_view reason) {
    nlohmann::json m = envelope("StateChange");
    m["seq"] = seq;
    m["from"] = std::string(from);
    m["to"] = std::string(to);
    m["reason"] = std::string(reason);
    return m;
}

nlohmann::json error_message(ErrorCode code, std::string_view detail, const std::vector<FieldError>& fields) {
    nlohmann::json m = envelope("Error");
    m["code"] = std::string(to_string(code));
    m["detail"] = std::string(detail);
    nlohmann::json f = nlohmann::json::array();
    for (const auto& e : fields) f.push_back({{"field", e.field}, {"message", e.message}});
    m["fields"] = f;
    return m;
}

nlohmann::json gap_message(std::uint64_t dropped) {
    nlohmann::json m = envelope("Gap");
    m["dropped"] = dropped;
    return m;
}

nlohmann::json config_submit_message(Procedure procedure, const nlohmann::json& config) {
    nlohmann::json m = envelope("ConfigSubmit");
    m["procedure"] = std::string(to_string(procedure));
    m["config"] = config;
    return m;
}

// --- Session ---------------------------------------------------------------

Session::Session(Procedure procedure, const nlohmann::json& payload, const AircraftPreset& preset)
    : procedure_(procedure), state_(TakeoffState::Standby) {
    const DistanceBreakdown* breakdown = nullptr;
    try {
        if (procedure == Procedure::Takeoff) {
            TakeoffRequest request = parse_takeoff(payload, preset);
            takeoff_.emplace(request.config, request.integrator);
            runway_length_ = request.config.runway.length;
            breakdown = &takeoff_->static_result();
        } else {
            LandingConfig config = parse_landing(payload, preset);
            landing_.emplace(config);
            runway_length_ = config.runway.length;
            breakdown = &landing_->static_result();
            state_ = LandingState::SystemReady;
        }
    } catch (const ValidationError&) {
        throw;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NonConvergence) throw Error(ErrorCode::InfeasibleConfig, e.what());
        throw;
    }
    static_total_ = breakdown->total;
    static_message_ = static_result_message(++seq_, procedure_, *breakdown, runway_length_);
}

std::string_view Session::state_name() const {
    return std::visit([](auto s) { return to_string(s); }, state_);
}

StatusColor Session::color() const {
    return std::visit([](auto s) { return color_of(s); }, state_);
}

void Session::move_to(std::variant<TakeoffState, LandingState> next, std::string_view reason,
                      std::vector<nlohmann::json>& out) {
    if (next == state_) return;
    const std::string from(state_name());
    state_ = next;
    auto m = state_change_message(++seq_, from, state_name(), reason);
    last_state_change_ = m;
    out.push_back(std::move(m));
}

std::vector<nlohmann::json> Session::on_frame(const TelemetryFrame& frame) {
    std::vector<nlohmann::json> out;
    if (takeoff_) {
        takeoff_frame(frame, out);
    } else {
        landing_frame(frame, out);
    }
    return out;
}

namespace {

bool rolling(TakeoffState s) {
    return s == TakeoffState::AsExpected || s == TakeoffState::Warning || s == TakeoffState::RejectTakeOff;
}

bool rejecting(TakeoffState s) {
    return s == TakeoffState::RtoInitiated || s == TakeoffState::RtoAsExpected || s == TakeoffState::RtoBrakeMore ||
           s == TakeoffState::RtoMaxBrake;
}

bool airborne(LandingState s) {
    return s == LandingState::WithinLimits || s == LandingState::Warning || s == LandingState::GoAround;
}

bool on_runway(LandingState s) {
    return s == LandingState::TdWithinLimits || s == LandingState::TdWarning || s == LandingState::BrakeMore;
}

std::string severity_reason(Severity s) { return "Severity:" + std::string(to_string(s)); }

}  // namespace

void Session::takeoff_frame(const TelemetryFrame& frame, std::vector<nlohmann::json>& out) {
    using K = TakeoffEvent::Kind;
    const StepResult r = takeoff_->step(frame);
    const PredictorEvents& ev = r.events;
    auto current = [&] { return std::get<TakeoffState>(state_); };
    auto fire = [&](TakeoffEvent e, std::string_view reason) {
        move_to(takeoff_transition(current(), e), reason, out);
    };

    if (ev.takeoff_started && current() == TakeoffState::Standby) fire({K::ThrottleUp}, "ThrottleUp");
    if (!r.snapshot) return;
    const PredictionSnapshot& snap = *r.snapshot;

    if (ev.rto_detected && (current() == TakeoffState::Calculating || rolling(current()) ||
                            current() == TakeoffState::TakeOff)) {
        fire({K::RtoDetected}, "RtoDetected");
        filter_.reset();
    }
    if (snap.procedure_stage == ProcedureStage::RtoBraking) {
        if (rejecting(current())) {
            if (ev.stopped) {
                fire({K::Stopped}, "Stopped");
            } else if (snap.confidence != Confidence::Seeding) {
                const Severity s = filter_.update(braking_severity(snap, snap.static_reference, runway_length_));
                fire({K::Severity, s}, severity_reason(s));
            }
        }
    } else {
        const Severity raw = classify(snap, snap.static_reference, runway_length_);
        if (ev.seed_complete && current() == TakeoffState::Calculating) {
            const Severity s = filter_.update(raw);
            fire({K::SeedComplete, s}, "SeedComplete:" + std::string(to_string(s)));
        } else if (rolling(current()) && !ev.v1_reached) {
            const Severity s = filter_.update(raw);
            fire({K::Severity, s}, severity_reason(s));
        }
        if (ev.v1_reached && (current() == TakeoffState::Calculating || rolling(current()))) {
            fire({K::V1Reached}, "V1Reached");
        }
    }
    out.push_back(dynamic_update_message(++seq_, snap, state_name(), color()));
}

void Session::landing_frame(const TelemetryFrame& frame, std::vector<nlohmann::json>& out) {
    using K = LandingEvent::Kind;
    const StepResult r = landing_->step(frame);
    if (!r.snapshot) return;
    const PredictorEvents& ev = r.events;
    const PredictionSnapshot& snap = *r.snapshot;
    auto current = [&] { return std::get<LandingState>(state_); };
    auto fire = [&](LandingEvent e, std::string_view reason) {
        move_to(landing_transition(current(), e), reason, out);
    };
    const Severity raw = classify(snap, snap.static_reference, runway_length_);

    bool handled = false;
    if (current() == LandingState::SystemReady) {
        filter_.reset();
        const Severity s = filter_.update(raw);
        fire({K::Below300ft, s}, "Below300ft:" + std::string(to_string(s)));
        handled = true;
    }
    if (ev.touchdown && airborne(current())) {
        filter_.reset();
        const Severity s = filter_.update(raw);
        fire({K::Touchdown, s}, "Touchdown:" + std::string(to_string(s)));
        handled = true;
    }
    if (!handled && (airborne(current()) || on_runway(current()))) {
        const Severity s = filter_.update(raw);
        fire({K::Severity, s}, severity_reason(s));
    }
    if (on_runway(current())) {
        if (ev.braking_started) fire({K::BrakingStarted}, "BrakingStarted");
        if (ev.stopped) fire({K::Stopped}, "Stopped");
    }
    out.push_back(dynamic_update_message(++seq_, snap, state_name(), color()));
}

// --- Fan-out ---------------------------------------------------------------

void Subscriber::push(nlohmann::json message) {
    {
        std::lock_guard lock(mutex_);
        if (closed_) return;
        if (items_.size() >= capacity_) {
            items_.pop_front();
            ++pending_gap_;
            ++dropped_total_;
        }
        items_.push_back(std::move(message));
    }
    cv_.notify_one();
}

std::optional<nlohmann::json> Subscriber::pop(std::chrono::milliseconds timeout) {
    std::unique_lock lock(mutex_);
    cv_.wait_for(lock, timeout, [&] { return closed_ || pending_gap_ > 0 || !items_.empty(); });
    if (pending_gap_ > 0) {
        const auto n = pending_gap_;
        pending_gap_ = 0;
        return gap_message(n);
    }
    if (items_.empty()) return std::nullopt;
    auto m = std::move(items_.front());
    items_.pop_front();
    return m;
}

void Subscriber::close() {
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
    }
    cv_.notify_all();
}

bool Subscriber::closed() const {
    std::lock_guard lock(mutex_);
    return closed_;
}

std::uint64_t Subscriber::dropped() const {
    std::lock_guard lock(mutex_);
    return dropped_total_;
}

std::shared_ptr<Subscriber> Hub::subscribe() {
    auto sub = std::make_shared<Subscriber>(client_capacity_);
    std::lock_guard lock(mutex_);
    if (latest_static_) sub->push(*latest_static_);
    if (latest_state_) sub->push(*latest_state_);
    subscribers_.push_back(sub);
    return sub;
}

void Hub::unsubscribe(const std::shared_ptr<Subscriber>& subscriber) {
    std::lock_guard lock(mutex_);
    std::erase(subscribers_, subscriber);
}

void Hub::publish(const nlohmann::json& message) {
    std::lock_guard lock(mutex_);
    const auto type = message.value("type", std::string());
    if (type == "StaticResult") {
        latest_static_ = message;
        latest_state_.reset();
    } else if (type == "StateChange") {
        latest_state_ = message;
    }
    for (auto& s : subscribers_) s->push(message);
}

void Hub::reset_session() {
    std::lock_guard lock(mutex_);
    latest_static_.reset();
    latest_state_.reset();
}

std::size_t Hub::subscriber_count() const {
    std::lock_guard lock(mutex_);
    return subscribers_.size();
}

// --- Framing ---------------------------------------------------------------

bool write_message(const net::Socket& socket, const nlohmann::json& message) {
    const std::string body = message.dump();
    if (body.size() > kMaxMessageBytes) return false;
    const auto n = static_cast<std::uint32_t>(body.size());
    std::vector<std::uint8_t> bytes{static_cast<std::uint8_t>(n >> 24), static_cast<std::uint8_t>(n >> 16),
                                    static_cast<std::uint8_t>(n >> 8), static_cast<std::uint8_t>(n)};
    bytes.insert(bytes.end(), body.begin(), body.end());
    return net::write_all(socket, bytes);
}

std::optional<std::string> read_frame(const net::Socket& socket, std::chrono::milliseconds timeout) {
    std::array<std::uint8_t, 4> header{};
    if (!net::read_exact(socket, header, timeout)) return std::nullopt;
    const std::uint32_t n = (std::uint32_t{header[0]} << 24) | (std::uint32_t{header[1]} << 16) |
                            (std::uint32_t{header[2]} << 8) | std::uint32_t{header[3]};
    if (n > kMaxMessageBytes) return std::nullopt;
    std::string body(n, '\0');
    if (n > 0 && !net::read_exact(socket, std::span(reinterpret_cast<std::uint8_t*>(body.data()), n), timeout)) {
        return std::nullopt;
    }
    return body;
}

std::optional<nlohmann::json> read_message(const net::Socket& socket, std::chrono::milliseconds timeout) {
    auto body = read_frame(socket, timeout);
    if (!body) return std::nullopt;
    auto j = nlohmann::json::parse(*body, nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    return j;
}

// --- Gateway ---------------------------------------------------------------

struct Gateway::Client {
    net::Socket socket;
    std::shared_ptr<Subscriber> subscriber;
    std::thread reader;
    std::thread writer;
    std::atomic<bool> done{false};
};

struct Gateway::HealthServer {
    httplib::Server server;
    std::thread thread;
};

Gateway::Gateway(GatewayOptions options)
    : options_(std::move(options)),
      listener_(options_.udp_port, options_.mapping, options_.frame_queue_capacity),
      hub_(options_.client_capacity) {}

Gateway::~Gateway() { stop(); }

void Gateway::start() {
    if (running_.exchange(true)) return;
    tcp_listener_ = net::listen_tcp(options_.port, options_.host);
    port_ = tcp_listener_.local_port();
    pipeline_heartbeat_ns_ = now_ns();
    listener_.start();
    pipeline_thread_ = std::thread([this] { pipeline_loop(); });
    accept_thread_ = std::thread([this] { accept_loop(); });
    if (options_.health_port) {
        health_server_ = std::make_unique<HealthServer>();
        health_server_->server.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(health().dump(), "application/json");
        });
        const int bound = *options_.health_port == 0
                              ? health_server_->server.bind_to_any_port(options_.host)
                              : (health_server_->server.bind_to_port(options_.host, *options_.health_port)
                                     ? *options_.health_port
                                     : -1);
        if (bound < 0) {
            stop();
            throw Error(ErrorCode::BindFailure,
                        "cannot bind health endpoint on port " + std::to_string(*options_.health_port));
        }
        health_port_ = static_cast<std::uint16_t>(bound);
        health_server_->thread = std::thread([this] { health_server_->server.listen_after_bind(); });
    }
}

void Gateway::stop() {
    if (!running_.exchange(false)) return;
    if (health_server_) {
        health_server_->server.stop();
        if (health_server_->thread.joinable()) health_server_->thread.join();
        health_server_.reset();
    }
    if (accept_thread_.joinable()) accept_thread_.join();
    listener_.stop();
    listener_.frames().close();
    if (pipeline_thread_.joinable()) pipeline_thread_.join();
    std::vector<std::shared_ptr<Client>> clients;
    {
        std::lock_guard lock(clients_mutex_);
        clients.swap(clients_);
    }
    for (auto& c : clients) {
        c->done = true;
        c->subscriber->close();
        ::shutdown(c->socket.fd(), SHUT_RDWR);
        if (c->reader.joinable()) c->reader.join();
        if (c->writer.joinable()) c->writer.join();
        hub_.unsubscribe(c->subscriber);
    }
    tcp_listener_.close();
}

nlohmann::json Gateway::submit(const nlohmann::json& message) {
    try {
        if (!message.is_object() || message.value("type", std::string()) != "ConfigSubmit") {
            throw ValidationError("type", "expected a ConfigSubmit message");
        }
        if (message.value("v", 0) != kSchemaVersion) {
            throw ValidationError("v", "unsupported schema version");
        }
        if (!message.contains("procedure") || !message.at("procedure").is_string()) {
            throw ValidationError("procedure", "is required");
        }
        const Procedure procedure = procedure_from_string(message.at("procedure").get<std::string>());
        const nlohmann::json config = message.value("config", nlohmann::json::object());
        auto session = std::make_unique<Session>(procedure, config, options_.preset);
        std::lock_guard lock(session_mutex_);
        session_ = std::move(session);
        hub_.reset_session();
        hub_.publish(session_->static_result());
        return session_->static_result();
    } catch (const ValidationError& e) {
        return error_message(ErrorCode::ValidationError, e.what(), e.fields());
    } catch (const Error& e) {
        return error_message(e.code(), e.what());
    }
}

nlohmann::json Gateway::health() const {
    const double heartbeat_age = static_cast<double>(now_ns() - pipeline_heartbeat_ns_.load()) * 1e-9;
    const bool alive = running_ && heartbeat_age < 1.0;
    nlohmann::json session = nullptr;
    {
        std::lock_guard lock(session_mutex_);
        if (session_) {
            session = {{"procedure", std::string(to_string(session_->procedure()))},
                       {"state", std::string(session_->state_name())},
                       {"seq", session_->last_seq()}};
        }
    }
    return {
        {"status", alive ? "ok" : "degraded"},
        {"pipeline_alive", alive},
        {"pipeline_heartbeat_age_s", heartbeat_age},
        {"frames_processed", frames_processed_.load()},
        {"telemetry", listener_.counters().to_json()},
        {"session", session},
        {"clients", hub_.subscriber_count()},
    };
}

void Gateway::pipeline_loop() {
    while (running_) {
        auto frame = listener_.frames().pop(std::chrono::milliseconds(100));
        pipeline_heartbeat_ns_ = now_ns();
        if (!frame) continue;
        std::lock_guard lock(session_mutex_);
        if (!session_) continue;
        try {
            for (const auto& m : session_->on_frame(*frame)) hub_.publish(m);
        } catch (const Error& e) {
            hub_.publish(error_message(e.code(), e.what()));
        }
        ++frames_processed_;
    }
}

void Gateway::accept_loop() {
    while (running_) {
        auto socket = net::accept_tcp(tcp_listener_, std::chrono::milliseconds(100));
        reap_clients();
        if (!socket) continue;
        auto client = std::make_shared<Client>();
        client->socket = std::move(*socket);
        client->subscriber = hub_.subscribe();
        client->reader = std::thread([this, client] { client_reader(client); });
        client->writer = std::thread([this, client] { client_writer(client); });
        std::lock_guard lock(clients_mutex_);
        clients_.push_back(std::move(client));
    }
}

void Gateway::reap_clients() {
    std::vector<std::shared_ptr<Client>> finished;
    {
        std::lock_guard lock(clients_mutex_);
        auto it = std::partition(clients_.begin(), clients_.end(), [](const auto& c) { return !c->done; });
        finished.assign(it, clients_.end());
        clients_.erase(it, clients_.end());
    }
    for (auto& c : finished) {
        c->subscriber->close();
        ::shutdown(c->socket.fd(), SHUT_RDWR);
        if (c->reader.joinable()) c->reader.join();
        if (c->writer.joinable()) c->writer.join();
        hub_.unsubscribe(c->subscriber);
    }
}

void Gateway::client_reader(std::shared_ptr<Client> client) {
    while (running_ && !client->done) {
        if (!net::wait_readable(client->socket, std::chrono::milliseconds(100))) continue;
        auto body = read_frame(client->socket, std::chrono::seconds(5));
        if (!body) break;
        auto message = nlohmann::json::parse(*body, nullptr, false);
        if (message.is_discarded()) {
            client->subscriber->push(error_message(ErrorCode::ValidationError, "malformed JSON message"));
            continue;
        }
        auto reply = submit(message);
        if (reply.value("type", std::string()) == "Error") client->subscriber->push(std::move(reply));
    }
    client->done = true;
    client->subscriber->close();
}

void Gateway::client_writer(std::shared_ptr<Client> client) {
    while (true) {
        auto message = client->subscriber->pop(std::chrono::milliseconds(100));
        if (!message) {
            if (client->subscriber->closed() || client->done) break;
            continue;
        }
        if (!write_message(client->socket, *message)) break;
    }
    client->done = true;
}

}  // namespace runsafe
