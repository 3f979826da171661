#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppe/alerting/buffered_publisher.hpp"

namespace ppe {

/// MQTT 3.1.1 packet encoding, limited to what a QoS-1 publisher needs.
namespace mqtt {

enum PacketType : std::uint8_t {
    kConnect = 1,
    kConnack = 2,
    kPublish = 3,
    kPuback = 4,
    kPingreq = 12,
    kPingresp = 13,
    kDisconnect = 14,
};

std::vector<std::uint8_t> encode_remaining_length(std::size_t length);

/// Decodes the variable-length field; returns (value, bytes consumed) or
/// nullopt if more bytes are needed. Throws ParseError on a malformed field.
std::optional<std::pair<std::size_t, std::size_t>> decode_remaining_length(std::span<const std::uint8_t> bytes);

struct ConnectOptions {
    std::string client_id;
    std::optional<std::string> username;
    std::optional<std::string> password;
    std::uint16_t keepalive_s = 30;
    bool clean_session = true;
};

std::vector<std::uint8_t> encode_connect(const ConnectOptions& opts);
std::vector<std::uint8_t> encode_publish_qos1(const std::string& topic, const std::string& payload,
                                              std::uint16_t packet_id);
std::vector<std::uint8_t> encode_pingreq();
std::vector<std::uint8_t> encode_disconnect();

struct PublishPacket {
    std::string topic;
    std::string payload;
    int qos = 0;
    std::uint16_t packet_id = 0;
};

/// Parses the body of a PUBLISH packet given its fixed-header flags.
PublishPacket decode_publish(std::uint8_t flags, std::span<const std::uint8_t> body);

}  // namespace mqtt

struct MqttEndpoint {
    std::string host = "127.0.0.1";
    std::uint16_t port = 1883;
};

/// Accepts "mqtt://host:port", "tcp://host:port" or "host[:port]".
MqttEndpoint parse_mqtt_url(const std::string& url);

struct MqttOptions {
    std::string url = "mqtt://127.0.0.1:1883";
    std::string client_id = "ppe-pipeline";
    std::optional<std::string> username;
    std::optional<std::string> password;
    std::uint16_t keepalive_s = 30;
    std::chrono::milliseconds io_timeout{5000};
};

/// Blocking MQTT 3.1.1 client over TCP publishing at QoS 1.
class MqttTransport final : public MessageTransport {
public:
    explicit MqttTransport(MqttOptions options);
    ~MqttTransport() override;

    MqttTransport(const MqttTransport&) = delete;
    MqttTransport& operator=(const MqttTransport&) = delete;

    void connect() override;
    bool connected() const override { return fd_ >= 0; }
    void publish(const std::string& topic, const std::string& payload) override;
    void disconnect() override;
    void keepalive() override;

private:
    void send_all(std::span<const std::uint8_t> bytes);
    /// Reads one packet; returns (first header byte, body).
    std::pair<std::uint8_t, std::vector<std::uint8_t>> read_packet();
    void close_socket();

    MqttOptions options_;
    MqttEndpoint endpoint_;
    int fd_ = -1;
    std::uint16_t next_packet_id_ = 1;
    std::chrono::steady_clock::time_point last_io_{};
};

}  // namespace ppe
