#pragma once

#include <cstdlib>
#include <string>
#include <utility>

// Eigen must be parsed before httplib: <resolv.h> defines a `_res` macro.
#include "liftsim/service/session.hpp"

#include <httplib.h>

namespace liftsim::service {

struct BindAddress {
  std::string host = "127.0.0.1";
  int port = 8080;
};

// "host:port", as given in LIFTSIM_BIND.
inline BindAddress parse_bind(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw InputError("bind address must look like host:port, got '" + text + "'");
  }
  BindAddress b;
  b.host = text.substr(0, colon);
  try {
    std::size_t used = 0;
    b.port = std::stoi(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw InputError("bind address has a bad port: '" + text + "'");
  }
  if (b.port < 0 || b.port > 65535) throw InputError("bind port out of range: " + std::to_string(b.port));
  return b;
}

inline BindAddress bind_from_env() {
  const char* v = std::getenv("LIFTSIM_BIND");
  return v && *v ? parse_bind(v) : BindAddress{};
}

namespace detail {

inline void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline json body_of(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  return io::parse_json(req.body, "request body");
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const NotFoundError& e) {
      reply(res, 404, {{"error", e.what()}});
    } catch (const InputError& e) {
      reply(res, 400, {{"error", e.what()}});
    } catch (const InfeasibleError& e) {
      reply(res, 422, {{"error", e.what()}});
    } catch (const NumericalError& e) {
      reply(res, 500, {{"error", e.what()}});
    } catch (const json::exception& e) {
      reply(res, 400, {{"error", std::string("bad request: ") + e.what()}});
    }
  };
}

}  // namespace detail

// Routes:
//   POST  /sessions                  create (profile document, snapshot or template)
//   GET   /sessions/:id              state
//   GET   /sessions/:id/simulation   both policies, 1RM bracket
//   POST  /sessions/:id/bump         {"delta_m", "v_mps", "sign": +1|-1}
//   PATCH /sessions/:id/setup        setup and session parameters, atomically
//   POST  /sessions/:id/undo
inline void install_routes(httplib::Server& srv, SessionStore& store) {
  using detail::guarded;
  using detail::reply;
  using Req = httplib::Request;
  using Res = httplib::Response;

  srv.Post("/sessions", guarded([&store](const Req& req, Res& res) {
             const auto id = store.create(detail::body_of(req));
             reply(res, 201, store.get(id));
           }));
  srv.Get("/sessions/:id", guarded([&store](const Req& req, Res& res) {
            reply(res, 200, store.get(req.path_params.at("id")));
          }));
  srv.Get("/sessions/:id/simulation", guarded([&store](const Req& req, Res& res) {
            reply(res, 200, store.simulation(req.path_params.at("id")));
          }));
  srv.Post("/sessions/:id/bump", guarded([&store](const Req& req, Res& res) {
             const auto b = detail::body_of(req);
             const double d = io::detail::number(b, "delta_m", "bump");
             const double v = io::detail::number(b, "v_mps", "bump");
             const int sign = io::detail::integer(b, "sign", "bump");
             reply(res, 200, store.bump(req.path_params.at("id"), d, v, sign));
           }));
  srv.Patch("/sessions/:id/setup", guarded([&store](const Req& req, Res& res) {
              reply(res, 200, store.update_setup(req.path_params.at("id"), detail::body_of(req)));
            }));
  srv.Post("/sessions/:id/undo", guarded([&store](const Req& req, Res& res) {
             reply(res, 200, store.undo(req.path_params.at("id")));
           }));
}

}  // namespace liftsim::service
