#include "ppe/alerting/mqtt_client.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "ppe/core/errors.hpp"

namespace ppe {
namespace mqtt {
namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

void put_string(std::vector<std::uint8_t>& out, const std::string& s) {
    if (s.size() > 0xffff) throw std::invalid_argument("MQTT string longer than 65535 bytes");
    put_u16(out, static_cast<std::uint16_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

std::vector<std::uint8_t> with_header(std::uint8_t first, const std::vector<std::uint8_t>& body) {
    std::vector<std::uint8_t> out{first};
    const auto len = encode_remaining_length(body.size());
    out.insert(out.end(), len.begin(), len.end());
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

}  // namespace

std::vector<std::uint8_t> encode_remaining_length(std::size_t length) {
    if (length > 268'435'455) throw std::invalid_argument("MQTT packet too large");
    std::vector<std::uint8_t> out;
    do {
        std::uint8_t byte = length % 128;
        length /= 128;
        if (length > 0) byte |= 0x80;
        out.push_back(byte);
    } while (length > 0);
    return out;
}

std::optional<std::pair<std::size_t, std::size_t>> decode_remaining_length(std::span<const std::uint8_t> bytes) {
    std::size_t value = 0;
    std::size_t multiplier = 1;
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        if (i == 4) throw ParseError("MQTT remaining length exceeds four bytes");
        value += (bytes[i] & 0x7f) * multiplier;
        multiplier *= 128;
        if ((bytes[i] & 0x80) == 0) return std::pair{value, i + 1};
    }
    if (bytes.size() >= 4) throw ParseError("MQTT remaining length exceeds four bytes");
    return std::nullopt;
}

std::vector<std::uint8_t> encode_connect(const ConnectOptions& opts) {
    std::vector<std::uint8_t> body;
    put_string(body, "MQTT");
    body.push_back(4);  // protocol level 3.1.1
    std::uint8_t flags = 0;
    if (opts.clean_session) flags |= 0x02;
    if (opts.password) flags |= 0x40;
    if (opts.username) flags |= 0x80;
    body.push_back(flags);
    put_u16(body, opts.keepalive_s);
    put_string(body, opts.client_id);
    if (opts.username) put_string(body, *opts.username);
    if (opts.password) put_string(body, *opts.password);
    return with_header(kConnect << 4, body);
}

std::vector<std::uint8_t> encode_publish_qos1(const std::string& topic, const std::string& payload,
                                              std::uint16_t packet_id) {
    std::vector<std::uint8_t> body;
    put_string(body, topic);
    put_u16(body, packet_id);
    body.insert(body.end(), payload.begin(), payload.end());
    return with_header(static_cast<std::uint8_t>((kPublish << 4) | (1 << 1)), body);
}

std::vector<std::uint8_t> encode_pingreq() { return {kPingreq << 4, 0}; }

std::vector<std::uint8_t> encode_disconnect() { return {kDisconnect << 4, 0}; }

PublishPacket decode_publish(std::uint8_t flags, std::span<const std::uint8_t> body) {
    PublishPacket p;
    p.qos = (flags >> 1) & 0x03;
    if (body.size() < 2) throw ParseError("PUBLISH too short");
    const std::size_t tlen = (std::size_t{body[0]} << 8) | body[1];
    std::size_t pos = 2 + tlen;
    if (body.size() < pos) throw ParseError("PUBLISH topic truncated");
    p.topic.assign(body.begin() + 2, body.begin() + static_cast<std::ptrdiff_t>(pos));
    if (p.qos > 0) {
        if (body.size() < pos + 2) throw ParseError("PUBLISH packet id truncated");
        p.packet_id = static_cast<std::uint16_t>((body[pos] << 8) | body[pos + 1]);
        pos += 2;
    }
    p.payload.assign(body.begin() + static_cast<std::ptrdiff_t>(pos), body.end());
    return p;
}

}  // namespace mqtt

MqttEndpoint parse_mqtt_url(const std::string& url) {
    std::string rest = url;
    for (const char* scheme : {"mqtt://", "tcp://"})
        if (rest.rfind(scheme, 0) == 0) rest = rest.substr(std::strlen(scheme));
    if (const auto slash = rest.find('/'); slash != std::string::npos) rest = rest.substr(0, slash);
    MqttEndpoint ep;
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos) {
        ep.host = rest;
    } else {
        ep.host = rest.substr(0, colon);
        try {
            const int port = std::stoi(rest.substr(colon + 1));
            if (port <= 0 || port > 65535) throw std::out_of_range("port");
            ep.port = static_cast<std::uint16_t>(port);
        } catch (const std::exception&) {
            throw ConfigError("invalid MQTT port in '" + url + "'");
        }
    }
    if (ep.host.empty()) throw ConfigError("MQTT url '" + url + "' has no host");
    return ep;
}

MqttTransport::MqttTransport(MqttOptions options)
    : options_(std::move(options)), endpoint_(parse_mqtt_url(options_.url)) {}

MqttTransport::~MqttTransport() { close_socket(); }

void MqttTransport::close_socket() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
}

void MqttTransport::connect() {
    close_socket();
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* found = nullptr;
    const auto port = std::to_string(endpoint_.port);
    if (::getaddrinfo(endpoint_.host.c_str(), port.c_str(), &hints, &found) != 0 || !found)
        throw TransportError("cannot resolve MQTT host " + endpoint_.host);

    timeval tv{};
    tv.tv_sec = options_.io_timeout.count() / 1000;
    tv.tv_usec = static_cast<suseconds_t>((options_.io_timeout.count() % 1000) * 1000);
    for (addrinfo* ai = found; ai; ai = ai->ai_next) {
        const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) continue;
        ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
        ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
        const int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
            fd_ = fd;
            break;
        }
        ::close(fd);
    }
    ::freeaddrinfo(found);
    if (fd_ < 0) throw TransportError("cannot connect to MQTT broker " + options_.url);

    try {
        send_all(mqtt::encode_connect({options_.client_id, options_.username, options_.password,
                                       options_.keepalive_s, true}));
        const auto [header, body] = read_packet();
        if ((header >> 4) != mqtt::kConnack || body.size() != 2)
            throw TransportError("MQTT broker did not answer CONNECT with CONNACK");
        if (body[1] != 0) throw TransportError("MQTT broker refused connection, code " + std::to_string(body[1]));
    } catch (...) {
        close_socket();
        throw;
    }
}

void MqttTransport::publish(const std::string& topic, const std::string& payload) {
    if (fd_ < 0) throw TransportError("MQTT transport not connected");
    const std::uint16_t id = next_packet_id_;
    next_packet_id_ = next_packet_id_ == 0xffff ? 1 : next_packet_id_ + 1;
    send_all(mqtt::encode_publish_qos1(topic, payload, id));
    for (;;) {
        const auto [header, body] = read_packet();
        const auto type = header >> 4;
        if (type == mqtt::kPuback && body.size() == 2 && ((body[0] << 8) | body[1]) == id) return;
        if (type == mqtt::kPingresp || type == mqtt::kPuback) continue;  // stale ack or ping answer
        throw TransportError("unexpected MQTT packet type " + std::to_string(type) + " while awaiting PUBACK");
    }
}

void MqttTransport::keepalive() {
    if (fd_ < 0) return;
    const auto idle = std::chrono::steady_clock::now() - last_io_;
    if (idle < std::chrono::seconds(options_.keepalive_s) / 2) return;
    send_all(mqtt::encode_pingreq());
    const auto [header, body] = read_packet();
    if ((header >> 4) != mqtt::kPingresp) throw TransportError("MQTT broker did not answer PINGREQ");
}

void MqttTransport::disconnect() {
    if (fd_ < 0) return;
    try {
        send_all(mqtt::encode_disconnect());
    } catch (const TransportError&) {
    }
    close_socket();
}

void MqttTransport::send_all(std::span<const std::uint8_t> bytes) {
    std::size_t sent = 0;
    while (sent < bytes.size()) {
        const auto n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
        if (n <= 0) {
            if (n < 0 && errno == EINTR) continue;
            close_socket();
            throw TransportError(std::string("MQTT send failed: ") + std::strerror(errno));
        }
        sent += static_cast<std::size_t>(n);
    }
    last_io_ = std::chrono::steady_clock::now();
}

std::pair<std::uint8_t, std::vector<std::uint8_t>> MqttTransport::read_packet() {
    auto read_exact = [&](std::uint8_t* dst, std::size_t n) {
        std::size_t got = 0;
        while (got < n) {
            const auto r = ::recv(fd_, dst + got, n - got, 0);
            if (r <= 0) {
                if (r < 0 && errno == EINTR) continue;
                close_socket();
                throw TransportError(r == 0 ? "MQTT broker closed the connection" : "MQTT receive timed out");
            }
            got += static_cast<std::size_t>(r);
        }
    };
    std::uint8_t header = 0;
    read_exact(&header, 1);
    std::vector<std::uint8_t> len_bytes;
    std::optional<std::pair<std::size_t, std::size_t>> len;
    while (!len) {
        std::uint8_t b = 0;
        read_exact(&b, 1);
        len_bytes.push_back(b);
        len = mqtt::decode_remaining_length(len_bytes);
    }
    std::vector<std::uint8_t> body(len->first);
    if (!body.empty()) read_exact(body.data(), body.size());
    last_io_ = std::chrono::steady_clock::now();
    return {header, std::move(body)};
}

}  // namespace ppe
