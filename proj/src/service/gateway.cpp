#include "triage/service/gateway.hpp"

#include <deque>
#include <mutex>
#include <set>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast.hpp>

#include "triage/service/protocol.hpp"

namespace triage::service {

namespace {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

}  // namespace

struct Gateway::Impl {
  LiveSim& sim;
  GatewayOptions options;
  net::io_context ioc;
  tcp::acceptor acceptor{ioc};
  std::vector<std::thread> threads;
  std::uint16_t bound_port{0};

  // Subscriptions held by live sessions, dropped on stop so the loop thread
  // never posts into a destroyed io_context.
  std::mutex token_mutex;
  std::set<std::uint64_t> tokens;

  Impl(LiveSim& s, GatewayOptions o) : sim(s), options(std::move(o)) {}

  std::uint64_t subscribe(LiveSim::Subscriber fn) {
    std::lock_guard lock(token_mutex);
    const auto token = sim.subscribe(std::move(fn));
    tokens.insert(token);
    return token;
  }

  void unsubscribe(std::uint64_t token) {
    std::lock_guard lock(token_mutex);
    if (tokens.erase(token)) sim.unsubscribe(token);
  }

  void unsubscribe_all() {
    std::lock_guard lock(token_mutex);
    for (auto t : tokens) sim.unsubscribe(t);
    tokens.clear();
  }

  void accept();
};

namespace {

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket socket, Gateway::Impl& gw) : ws_(std::move(socket)), gw_(gw) {}

  ~WsSession() {
    if (token_) gw_.unsubscribe(token_);
  }

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) { self->on_accept(ec); });
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    std::weak_ptr<WsSession> weak = weak_from_this();
    auto exec = ws_.get_executor();
    token_ = gw_.subscribe([weak, exec](Frame frame) {
      net::post(exec, [weak, frame = std::move(frame)] {
        if (auto self = weak.lock()) self->enqueue(frame);
      });
    });
    read();
  }

  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

  void on_read(beast::error_code ec) {
    if (ec) {
      shutdown();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    handle(text);
    read();
  }

  void handle(const std::string& text) {
    sim::Command cmd;
    try {
      cmd = parse_command(text);
    } catch (const MalformedMessage& e) {
      send_ack(e.id(), {false, "malformed"}, std::nullopt);
      return;
    }
    if (!seen_ids_.insert(cmd.id).second) {
      send_ack(cmd.id, {false, "duplicate_command_id"}, std::nullopt);
      return;
    }
    std::weak_ptr<WsSession> weak = weak_from_this();
    auto exec = ws_.get_executor();
    gw_.sim.submit(cmd, [weak, exec, id = cmd.id](const sim::CommandResult& result, std::optional<long> step) {
      auto frame = std::make_shared<const std::string>(ack_json(id, result, step).dump());
      net::post(exec, [weak, frame = std::move(frame)] {
        if (auto self = weak.lock()) self->enqueue(frame);
      });
    });
  }

  void send_ack(const std::optional<std::string>& id, const sim::CommandResult& result, std::optional<long> step) {
    enqueue(std::make_shared<const std::string>(ack_json(id, result, step).dump()));
  }

  void enqueue(Frame frame) {
    if (closed_) return;
    if (out_.size() >= gw_.options.max_backlog) {
      // slow reader: drop the connection rather than the simulation's pace
      shutdown();
      beast::get_lowest_layer(ws_).close();
      return;
    }
    out_.push_back(std::move(frame));
    if (out_.size() == 1) write();
  }

  void write() {
    ws_.text(true);
    ws_.async_write(net::buffer(*out_.front()),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_write(ec); });
  }

  void on_write(beast::error_code ec) {
    if (ec) {
      shutdown();
      return;
    }
    out_.pop_front();
    if (!out_.empty() && !closed_) write();
  }

  void shutdown() {
    closed_ = true;
    out_.clear();
    if (token_) gw_.unsubscribe(std::exchange(token_, 0));
  }

  websocket::stream<beast::tcp_stream> ws_;
  Gateway::Impl& gw_;
  beast::flat_buffer buffer_;
  std::deque<Frame> out_;
  std::set<std::string> seen_ids_;
  std::uint64_t token_{0};
  bool closed_{false};
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket socket, Gateway::Impl& gw) : stream_(std::move(socket)), gw_(gw) {}

  void run() { read(); }

 private:
  void read() {
    req_ = {};
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

  void on_read(beast::error_code ec) {
    if (ec) {
      beast::error_code ignored;
      stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
      return;
    }
    if (websocket::is_upgrade(req_) && req_.target() == "/ws") {
      stream_.expires_never();
      std::make_shared<WsSession>(stream_.release_socket(), gw_)->run(std::move(req_));
      return;
    }
    respond();
  }

  void respond() {
    auto res = std::make_shared<http::response<http::string_body>>();
    res->version(req_.version());
    res->keep_alive(req_.keep_alive());
    res->set(http::field::server, "triage");
    res->set(http::field::content_type, "application/json");
    if (req_.target() == "/health") {
      if (req_.method() == http::verb::get) {
        res->result(http::status::ok);
        res->body() = health_json(gw_.options.scenario_name, gw_.sim.sim_time(), gw_.sim.done()).dump();
      } else {
        res->result(http::status::method_not_allowed);
        res->set(http::field::allow, "GET");
        res->body() = R"({"error":"method not allowed"})";
      }
    } else if (req_.target() == "/ws") {
      res->result(http::status::upgrade_required);
      res->body() = R"({"error":"websocket upgrade required"})";
    } else {
      res->result(http::status::not_found);
      res->body() = R"({"error":"not found"})";
    }
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
      if (ec || !res->keep_alive()) {
        beast::error_code ignored;
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        return;
      }
      self->read();
    });
  }

  beast::tcp_stream stream_;
  Gateway::Impl& gw_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

}  // namespace

void Gateway::Impl::accept() {
  acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
    if (ec == net::error::operation_aborted || !acceptor.is_open()) return;
    if (!ec) std::make_shared<HttpSession>(std::move(socket), *this)->run();
    accept();
  });
}

Gateway::Gateway(LiveSim& sim, GatewayOptions options) : impl_(std::make_unique<Impl>(sim, std::move(options))) {}

Gateway::~Gateway() { stop(); }

void Gateway::start() {
  auto& a = impl_->acceptor;
  beast::error_code ec;
  const auto address = net::ip::make_address(impl_->options.address, ec);
  if (ec) throw BindError("invalid address '" + impl_->options.address + "': " + ec.message());
  const tcp::endpoint endpoint(address, impl_->options.port);
  a.open(endpoint.protocol(), ec);
  if (!ec) a.set_option(net::socket_base::reuse_address(true), ec);
  if (!ec) a.bind(endpoint, ec);
  if (!ec) a.listen(net::socket_base::max_listen_connections, ec);
  if (ec) {
    a.close();
    throw BindError("cannot listen on " + impl_->options.address + ":" + std::to_string(impl_->options.port) + ": " +
                    ec.message());
  }
  impl_->bound_port = a.local_endpoint().port();
  impl_->accept();
  for (int i = 0; i < std::max(1, impl_->options.threads); ++i) {
    impl_->threads.emplace_back([this] { impl_->ioc.run(); });
  }
}

void Gateway::stop() {
  if (!impl_) return;
  beast::error_code ignored;
  impl_->acceptor.close(ignored);
  impl_->ioc.stop();
  for (auto& t : impl_->threads) {
    if (t.joinable()) t.join();
  }
  impl_->threads.clear();
  impl_->unsubscribe_all();
}

std::uint16_t Gateway::port() const { return impl_->bound_port; }

}  // namespace triage::service
