#pragma once

// WebSocket transport for GatewaySession: one session per connection, one
// JSON envelope per text message. Runs on a single io_context thread.

#include <atomic>
#include <cstdlib>
#include <deque>
#include <memory>
#include <string>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "tacton/gateway/session.hpp"

namespace tacton::gateway {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = boost::beast::websocket;
using tcp = boost::asio::ip::tcp;

struct ServerConfig {
  std::string listen_address = "127.0.0.1";
  unsigned short port = 8765;
  std::string catalog_path;  // empty: built-in catalog
  std::string world_dir = "data";
  bool virtual_time = false;

  static ServerConfig from_json(const nlohmann::json& j) {
    ServerConfig c;
    c.listen_address = j.value("listen_address", c.listen_address);
    c.port = j.value("port", c.port);
    c.catalog_path = j.value("catalog_path", c.catalog_path);
    c.world_dir = j.value("world_dir", c.world_dir);
    c.virtual_time = j.value("virtual_time", c.virtual_time);
    return c;
  }

  static ServerConfig load(const std::filesystem::path& path) {
    try {
      return from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
      throw Error("malformed config " + path.string() + ": " + e.what());
    }
  }

  // TACTON_PORT overrides the configured port.
  void apply_env() {
    if (const char* p = std::getenv("TACTON_PORT"); p && *p) {
      const long v = std::strtol(p, nullptr, 10);
      if (v < 0 || v > 65535) throw Error("TACTON_PORT out of range");
      port = static_cast<unsigned short>(v);
    }
  }
};

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, GatewayContext ctx, const Clock& clock, std::string id)
      : ws_{std::move(socket)}, timer_{ws_.get_executor()} {
    session_ = std::make_unique<GatewaySession>(std::move(id), std::move(ctx), clock,
                                                [this](const std::string& text) { enqueue(text); });
  }

  void start() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
      if (ec) return;
      self->session_->open();
      self->read();
    });
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->closed_ = true;
        self->timer_.cancel();
        return;
      }
      const auto text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->session_->handle(text);
      self->schedule();
      self->read();
    });
  }

  // Wakes up at the next scheduled presentation instant.
  void schedule() {
    if (closed_) return;
    auto next = session_->next_wakeup_ms();
    timer_.cancel();
    if (!next) return;
    const auto now = clock_now();
    timer_.expires_after(std::chrono::milliseconds(std::max<Millis>(0, *next - now)));
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec || self->closed_) return;
      self->session_->tick();
      self->schedule();
    });
  }

  Millis clock_now() const { return SteadyClock{}.now_ms(); }

  void enqueue(const std::string& text) {
    if (closed_) return;
    outbox_.push_back(text);
    if (outbox_.size() == 1) write();
  }

  void write() {
    ws_.text(true);
    ws_.async_write(net::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->closed_ = true;
        return;
      }
      self->outbox_.pop_front();
      if (!self->outbox_.empty()) self->write();
    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  net::steady_timer timer_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  std::unique_ptr<GatewaySession> session_;
  bool closed_ = false;
};

class Server {
 public:
  // Binds immediately; a bind failure throws.
  Server(const ServerConfig& config, const Catalog& catalog) : acceptor_{io_} {
    ctx_.catalog = &catalog;
    ctx_.world_dir = config.world_dir;
    ctx_.virtual_time = config.virtual_time;
    beast::error_code ec;
    const auto address = net::ip::make_address(config.listen_address, ec);
    if (ec) throw Error("invalid listen address '" + config.listen_address + "'");
    const tcp::endpoint endpoint{address, config.port};
    acceptor_.open(endpoint.protocol(), ec);
    if (!ec) acceptor_.set_option(net::socket_base::reuse_address(true), ec);
    if (!ec) acceptor_.bind(endpoint, ec);
    if (!ec) acceptor_.listen(net::socket_base::max_listen_connections, ec);
    if (ec) throw Error("cannot listen on " + config.listen_address + ":" + std::to_string(config.port) + ": " + ec.message());
  }

  unsigned short port() const { return acceptor_.local_endpoint().port(); }

  void run() {
    accept();
    io_.run();
  }

  void stop() {
    net::post(io_, [this] {
      beast::error_code ec;
      acceptor_.close(ec);
      io_.stop();
    });
  }

 private:
  void accept() {
    acceptor_.async_accept(net::make_strand(io_), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<Connection>(std::move(socket), ctx_, clock_, "s" + std::to_string(++sessions_))->start();
      accept();
    });
  }

  net::io_context io_{1};
  tcp::acceptor acceptor_;
  GatewayContext ctx_;
  SteadyClock clock_;
  std::uint64_t sessions_ = 0;
};

}  // namespace tacton::gateway
