//! Mock cloud QUBO service and its client.
//!
//! The protocol is newline-delimited ASCII over TCP, one request per
//! connection:
//!
//! ```text
//! QUBO <dimension> <nnz> <budget_iters>
//! <u> <v> <value>        (nnz lines, 0-indexed)
//! END
//! ```
//!
//! answered by
//!
//! ```text
//! SOLUTION <objective>
//! <dimension characters over {0,1}>
//! END
//! ```
//!
//! or a single `ERR <message>` line. The server only ever sees the QUBO.

use std::io::{self, BufRead, BufReader, Read, Write};
use std::net::{Shutdown, SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::Duration;

use thiserror::Error;

use crate::graph::CutAssignment;
use crate::qubo::{format_triplet, parse_triplet, qubo_objective, QuboInstance};
use crate::solvers::{solve_exact, solve_tabu, SolveResult, TabuParams};

/// Requests declaring more variables than this are refused.
pub const MAX_DIMENSION: usize = 1 << 20;

#[derive(Debug, Error)]
pub enum RemoteError {
    #[error("connection to {addr} failed: {source}")]
    Connect {
        addr: SocketAddr,
        #[source]
        source: io::Error,
    },
    #[error("timed out talking to the solver service")]
    Timeout,
    #[error("transport error: {0}")]
    Io(#[source] io::Error),
    #[error("server rejected request: {0}")]
    Server(String),
    #[error("malformed response: {0}")]
    Protocol(String),
    #[error("server reported objective {server} but the assignment evaluates to {local}")]
    ObjectiveMismatch { server: f64, local: f64 },
}

impl From<io::Error> for RemoteError {
    fn from(e: io::Error) -> Self {
        match e.kind() {
            io::ErrorKind::TimedOut | io::ErrorKind::WouldBlock => Self::Timeout,
            _ => Self::Io(e),
        }
    }
}

/// Outcome of one submission, with byte counts measured on the socket.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    pub request_bytes: usize,
    pub response_bytes: usize,
    pub triplet_count: usize,
    pub server_objective: f64,
    pub assignment: CutAssignment,
}

/// Serializes a request exactly as it goes on the wire.
pub fn encode_request(q: &QuboInstance, budget_iters: u64) -> String {
    let mut out = format!(
        "QUBO {} {} {}\n",
        q.dimension(),
        q.triplets().len(),
        budget_iters
    );
    for t in q.triplets() {
        out.push_str(&format_triplet(t));
        out.push('\n');
    }
    out.push_str("END\n");
    out
}

pub fn encode_response(objective: f64, assignment: &CutAssignment) -> String {
    format!("SOLUTION {objective}\n{assignment}\nEND\n")
}

/// Parses a full response body. `dimension` is the size the client sent.
pub fn decode_response(
    body: &str,
    dimension: usize,
) -> Result<(f64, CutAssignment), RemoteError> {
    if let Some(msg) = body.strip_prefix("ERR ") {
        return Err(RemoteError::Server(msg.trim_end_matches('\n').to_string()));
    }
    let protocol = |m: &str| RemoteError::Protocol(m.to_string());
    let rest = body
        .strip_suffix('\n')
        .ok_or_else(|| protocol("response not newline-terminated"))?;
    let lines: Vec<&str> = rest.split('\n').collect();
    let [head, bits, end] = lines.as_slice() else {
        return Err(protocol("expected exactly three lines"));
    };
    if *end != "END" {
        return Err(protocol("missing END terminator"));
    }
    let objective = head
        .strip_prefix("SOLUTION ")
        .ok_or_else(|| protocol("missing SOLUTION header"))?
        .parse::<f64>()
        .map_err(|e| RemoteError::Protocol(format!("bad objective: {e}")))?;
    if bits.len() != dimension {
        return Err(RemoteError::Protocol(format!(
            "assignment has {} characters, expected {dimension}",
            bits.len()
        )));
    }
    let assignment = bits
        .parse::<CutAssignment>()
        .map_err(|e| RemoteError::Protocol(e.to_string()))?;
    Ok((objective, assignment))
}

/// Sends `q` to the service and validates the returned objective locally.
pub fn submit(
    addr: impl ToSocketAddrs,
    q: &QuboInstance,
    budget_iters: u64,
    timeout: Duration,
) -> Result<TransferReport, RemoteError> {
    let addr = addr
        .to_socket_addrs()
        .map_err(RemoteError::Io)?
        .next()
        .ok_or_else(|| RemoteError::Protocol("address resolved to nothing".into()))?;
    let mut stream = TcpStream::connect_timeout(&addr, timeout).map_err(|source| {
        if source.kind() == io::ErrorKind::TimedOut {
            RemoteError::Timeout
        } else {
            RemoteError::Connect { addr, source }
        }
    })?;
    stream.set_read_timeout(Some(timeout))?;
    stream.set_write_timeout(Some(timeout))?;

    let request = encode_request(q, budget_iters);
    stream.write_all(request.as_bytes())?;
    stream.flush()?;

    let mut body = Vec::new();
    stream.read_to_end(&mut body)?;
    let text = String::from_utf8(body)
        .map_err(|_| RemoteError::Protocol("response is not ASCII".into()))?;
    let (server_objective, assignment) = decode_response(&text, q.dimension())?;
    let local = qubo_objective(q, &assignment)
        .map_err(|e| RemoteError::Protocol(e.to_string()))?;
    if local != server_objective {
        return Err(RemoteError::ObjectiveMismatch {
            server: server_objective,
            local,
        });
    }
    Ok(TransferReport {
        request_bytes: request.len(),
        response_bytes: text.len(),
        triplet_count: q.triplets().len(),
        server_objective,
        assignment,
    })
}

/// Algorithm run by the service for every request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServerSolver {
    Exact,
    /// Tabu search with the request's iteration budget.
    Tabu { seed: u64 },
}

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub solver: ServerSolver,
    /// Keep every decoded instance for inspection through [`ServerHandle::received`].
    pub record: bool,
    pub read_timeout: Duration,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self {
            solver: ServerSolver::Tabu { seed: 0 },
            record: false,
            read_timeout: Duration::from_secs(30),
        }
    }
}

type Received = Arc<Mutex<Vec<QuboInstance>>>;

/// A bound but not yet running service.
pub struct Server {
    listener: TcpListener,
    config: ServerConfig,
    stop: Arc<AtomicBool>,
    received: Received,
}

impl Server {
    pub fn bind(addr: impl ToSocketAddrs, config: ServerConfig) -> io::Result<Self> {
        Ok(Self {
            listener: TcpListener::bind(addr)?,
            config,
            stop: Arc::new(AtomicBool::new(false)),
            received: Arc::default(),
        })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Accepts connections until shut down, one handler thread per connection.
    pub fn run(self) -> io::Result<()> {
        for stream in self.listener.incoming() {
            if self.stop.load(Ordering::SeqCst) {
                break;
            }
            let stream = match stream {
                Ok(s) => s,
                Err(e) => {
                    log::warn!("accept failed: {e}");
                    continue;
                }
            };
            let config = self.config.clone();
            let received = Arc::clone(&self.received);
            thread::spawn(move || {
                if let Err(e) = handle_connection(stream, &config, &received) {
                    log::warn!("connection error: {e}");
                }
            });
        }
        Ok(())
    }

    /// Runs the accept loop on a background thread.
    pub fn spawn(self) -> io::Result<ServerHandle> {
        let addr = self.local_addr()?;
        let stop = Arc::clone(&self.stop);
        let received = Arc::clone(&self.received);
        let join = thread::spawn(move || self.run());
        Ok(ServerHandle {
            addr,
            stop,
            received,
            join: Some(join),
        })
    }
}

/// Blocks serving requests on `addr`.
pub fn serve(addr: impl ToSocketAddrs, config: ServerConfig) -> io::Result<()> {
    let server = Server::bind(addr, config)?;
    log::info!("serving on {}", server.local_addr()?);
    server.run()
}

pub struct ServerHandle {
    addr: SocketAddr,
    stop: Arc<AtomicBool>,
    received: Received,
    join: Option<JoinHandle<io::Result<()>>>,
}

impl ServerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Instances decoded so far (only populated with `record` enabled).
    pub fn received(&self) -> Vec<QuboInstance> {
        self.received.lock().expect("poisoned").clone()
    }

    pub fn shutdown(mut self) {
        self.stop_inner();
    }

    fn stop_inner(&mut self) {
        if let Some(join) = self.join.take() {
            self.stop.store(true, Ordering::SeqCst);
            // Wake the blocking accept.
            let _ = TcpStream::connect(self.addr);
            let _ = join.join();
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.stop_inner();
    }
}

fn handle_connection(
    stream: TcpStream,
    config: &ServerConfig,
    received: &Received,
) -> io::Result<()> {
    stream.set_read_timeout(Some(config.read_timeout))?;
    let mut writer = stream.try_clone()?;
    let mut reader = BufReader::new(stream);
    let reply = match read_request(&mut reader) {
        Ok(Some((q, budget))) => {
            if config.record {
                received.lock().expect("poisoned").push(q.clone());
            }
            match run_solver(config.solver, &q, budget) {
                Ok(r) => encode_response(r.objective, &r.assignment),
                Err(msg) => error_line(&msg),
            }
        }
        // Peer connected and left without sending anything.
        Ok(None) => return Ok(()),
        Err(msg) => error_line(&msg),
    };
    writer.write_all(reply.as_bytes())?;
    writer.flush()?;
    writer.shutdown(Shutdown::Both)
}

fn error_line(msg: &str) -> String {
    format!("ERR {}\n", msg.replace(['\n', '\r'], " "))
}

fn run_solver(solver: ServerSolver, q: &QuboInstance, budget: u64) -> Result<SolveResult, String> {
    match solver {
        ServerSolver::Exact => solve_exact(q),
        ServerSolver::Tabu { seed } => solve_tabu(q, &TabuParams::iterations(budget), seed),
    }
    .map_err(|e| e.to_string())
}

fn read_line<R: BufRead>(reader: &mut R) -> Result<Option<String>, String> {
    let mut line = String::new();
    match reader.read_line(&mut line) {
        Ok(0) => Ok(None),
        Ok(_) => {
            if !line.ends_with('\n') {
                return Err("line not newline-terminated".into());
            }
            line.pop();
            Ok(Some(line))
        }
        Err(e) => Err(format!("read failed: {e}")),
    }
}

/// Reads one request; `Ok(None)` when the peer sent nothing at all.
fn read_request<R: BufRead>(reader: &mut R) -> Result<Option<(QuboInstance, u64)>, String> {
    let Some(header) = read_line(reader)? else {
        return Ok(None);
    };
    let fields: Vec<&str> = header.split(' ').collect();
    let ["QUBO", dim, nnz, budget] = fields.as_slice() else {
        return Err(format!("expected `QUBO <dimension> <nnz> <budget_iters>`, got `{header}`"));
    };
    let dim: usize = dim.parse().map_err(|e| format!("bad dimension: {e}"))?;
    let nnz: usize = nnz.parse().map_err(|e| format!("bad nnz: {e}"))?;
    let budget: u64 = budget.parse().map_err(|e| format!("bad budget: {e}"))?;
    if dim > MAX_DIMENSION {
        return Err(format!("dimension {dim} exceeds limit {MAX_DIMENSION}"));
    }
    let mut triplets = Vec::with_capacity(nnz.min(1 << 20));
    for i in 0..nnz {
        let line = read_line(reader)?
            .ok_or_else(|| format!("connection closed after {i} of {nnz} triplets"))?;
        if line == "END" {
            return Err(format!("nnz mismatch: header declares {nnz}, got {i}"));
        }
        triplets.push(parse_triplet(&line).map_err(|e| format!("triplet {i}: {e}"))?);
    }
    match read_line(reader)? {
        Some(line) if line == "END" => {}
        Some(_) => return Err(format!("nnz mismatch: more than {nnz} triplet lines")),
        None => return Err("missing END terminator".into()),
    }
    let q = QuboInstance::from_triplets(dim, triplets).map_err(|e| e.to_string())?;
    Ok(Some((q, budget)))
}
