#pragma once

#include <iosfwd>

#include "avsearch/config.hpp"

namespace avsearch {

// Newline-delimited JSON request loop for driving the environment from an
// external process (e.g. a trainer). One client at a time.
//
// On start the server writes a versioned hello line:
//   {"type":"hello","protocol":"avsearch-bridge","version":1}
// Requests:
//   {"type":"reset","seed":<u64>,"map_path":"<path>"}
//   {"type":"step","action":"turn_left|turn_right|move_forward|stay|commit"}
//   {"type":"close"}
// Replies to reset/step:
//   {"type":"observation","obs":{...},"reward":<f>,"done":<bool>,"outcome":<str|null>}
// where obs carries, in this order: est_theta (last 4 MAP azimuths, oldest
// first), theta_uncertainty, est_r (last 4 MAP ranges), r_uncertainty,
// last_actions (4 codes, 0 = none, 1..5 = actions), posterior (range-major,
// num_range_bins*num_azimuth_bins values), posterior_entropy, elapsed_steps.
// Malformed requests get {"type":"error","message":...} and the loop
// continues. close is answered with {"type":"bye"}.
void bridge_serve(std::istream& in, std::ostream& out, const SimulationConfig& cfg);

// TCP transport on 127.0.0.1:port. Serves the first client and refuses any
// connection that arrives while it is active (an error line, then close).
// Returns after the served client disconnects. port 0 picks an ephemeral
// port; when bound_port is non-null it receives the actual port before the
// accept loop starts.
void bridge_serve_tcp(int port, const SimulationConfig& cfg, int* bound_port = nullptr);

}  // namespace avsearch
