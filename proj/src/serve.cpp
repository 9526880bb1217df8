#include "carto/mapexport.hpp"

#include <httplib.h>

#include <filesystem>
#include <stdexcept>

namespace carto {

struct MapServer::Impl {
  httplib::Server server;
};

MapServer::MapServer(const std::string& dir, const std::string& host, int port) : impl_(std::make_unique<Impl>()) {
  if (!std::filesystem::is_directory(dir)) throw std::runtime_error("directory '" + dir + "' does not exist");
  impl_->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  if (!impl_->server.set_mount_point("/", dir)) throw std::runtime_error("cannot serve '" + dir + "'");
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port(host);
    if (port_ < 0) throw std::runtime_error("cannot bind to " + host);
  } else {
    if (!impl_->server.bind_to_port(host, port)) {
      throw std::runtime_error("port " + std::to_string(port) + " on " + host + " is busy");
    }
    port_ = port;
  }
}

MapServer::~MapServer() { stop(); }

void MapServer::run() { impl_->server.listen_after_bind(); }

void MapServer::stop() { impl_->server.stop(); }

}  // namespace carto
