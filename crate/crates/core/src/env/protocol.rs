// SPDX-License-Identifier: Apache-2.0
//! Newline-delimited JSON protocol for serving episodes, and the client side
//! used to query an external agent for actions.
//!
//! Every request is one JSON object with a `cmd` field; every reply is one
//! JSON object. Failed requests get `{"error": "..."}` and leave the session
//! as it was, except a `hello` with the wrong version, after which the
//! server closes the connection. See `PROTOCOL.md` for the message shapes.

use std::collections::HashMap;
use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream, ToSocketAddrs};
use std::sync::Arc;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{ActionSource, EnvConfig, Episode, FeatureScale, Observation, RewardModel, DEFAULT_K};
use crate::circuit::Circuit;
use crate::fault::{enumerate_faults, FaultSite};
use crate::podem::DEFAULT_BACKTRACK_LIMIT;

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(tag = "cmd", rename_all = "snake_case", deny_unknown_fields)]
pub enum Request {
    Hello { version: u32 },
    Reset(ResetRequest),
    Step { action: usize },
    Metrics,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ResetRequest {
    /// Path to a bench file, read by the server.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bench: Option<String>,
    /// Inline bench text; used when `bench` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bench_text: Option<String>,
    /// A fault-list line. When absent the seed picks one from the
    /// uncollapsed universe.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<String>,
    #[serde(default)]
    pub seed: u64,
    /// Defaults to 100; `null` or absent means the default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backtrack_limit: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

type Cached = (Arc<Circuit>, Arc<FeatureScale<f64>>);

/// State of one connection: at most one episode plus parsed circuits.
#[derive(Default)]
pub struct Session {
    circuits: HashMap<String, Cached>,
    episode: Option<Episode<f64>>,
}

/// Reply to one request line.
pub struct Reply {
    pub body: Value,
    /// The server should close the connection after sending `body`.
    pub close: bool,
}

fn error(message: impl Into<String>) -> Value {
    json!({ "error": message.into() })
}

impl Session {
    pub fn new() -> Session {
        Session::default()
    }

    pub fn handle_line(&mut self, line: &str) -> Reply {
        let request: Request = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(e) => {
                return Reply {
                    body: error(format!("malformed request: {e}")),
                    close: false,
                }
            }
        };
        let mut close = false;
        let body = match request {
            Request::Hello { version } if version == PROTOCOL_VERSION => {
                json!({ "version": PROTOCOL_VERSION, "feature_dim": super::FEATURE_DIM })
            }
            Request::Hello { version } => {
                close = true;
                error(format!(
                    "unsupported protocol version {version}, expected {PROTOCOL_VERSION}"
                ))
            }
            Request::Reset(r) => self.reset(r).unwrap_or_else(error),
            Request::Step { action } => match self.episode.as_mut() {
                None => error("no active episode"),
                Some(ep) => match ep.step(action) {
                    Ok(t) => json!({
                        "reward": t.reward,
                        "kind": t.kind,
                        "obs": t.next_state,
                        "done": t.done,
                        "status": t.status,
                    }),
                    Err(e) => error(e.to_string()),
                },
            },
            Request::Metrics => match &self.episode {
                None => error("no active episode"),
                Some(ep) => {
                    let m = ep.metrics();
                    let mut body = serde_json::to_value(&m).expect("metrics serialise");
                    body["fault"] = json!(m.fault.display(&ep.circuit().netlist).to_string());
                    body
                }
            },
        };
        Reply { body, close }
    }

    fn circuit(&mut self, r: &ResetRequest) -> Result<Cached, String> {
        let (key, text, name) = match (&r.bench, &r.bench_text) {
            (Some(path), _) => {
                let key = format!("path:{path}");
                if let Some(c) = self.circuits.get(&key) {
                    return Ok(c.clone());
                }
                let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
                let name = std::path::Path::new(path)
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                (key, text, name)
            }
            (None, Some(text)) => (format!("text:{text}"), text.clone(), "inline".to_string()),
            (None, None) => return Err("reset needs 'bench' or 'bench_text'".into()),
        };
        if let Some(c) = self.circuits.get(&key) {
            return Ok(c.clone());
        }
        let circuit = Circuit::from_bench(&text, &name).map_err(|e| e.to_string())?;
        let scale = FeatureScale::new(&circuit);
        let entry = (Arc::new(circuit), Arc::new(scale));
        self.circuits.insert(key, entry.clone());
        Ok(entry)
    }

    fn reset(&mut self, r: ResetRequest) -> Result<Value, String> {
        let (circuit, scale) = self.circuit(&r)?;
        let nl = &circuit.netlist;
        let fault = match &r.fault {
            Some(line) => FaultSite::parse(line, nl).map_err(|e| e.to_string())?,
            None => {
                let universe = enumerate_faults(nl);
                if universe.is_empty() {
                    return Err("circuit has no faults".into());
                }
                universe[StdRng::seed_from_u64(r.seed).gen_range(0..universe.len())]
            }
        };
        let k = r.k.unwrap_or(DEFAULT_K);
        if k == 0 {
            return Err("k must be positive".into());
        }
        let config = EnvConfig {
            k,
            backtrack_limit: r.backtrack_limit.unwrap_or(DEFAULT_BACKTRACK_LIMIT),
            reward: RewardModel::default(),
        };
        let fault_text = fault.display(nl).to_string();
        let ep = Episode::new(circuit, scale, fault, config).map_err(|e| e.to_string())?;
        let body = json!({
            "fault": fault_text,
            "k": k,
            "obs": ep.observation(),
            "done": ep.done(),
            "status": ep.status(),
        });
        self.episode = Some(ep);
        Ok(body)
    }
}

/// One message as a single buffer, so sockets see one write per message.
fn to_line(body: &Value) -> Vec<u8> {
    let mut buf = serde_json::to_vec(body).expect("json values serialise");
    buf.push(b'\n');
    buf
}

/// Serves one session over a reader/writer pair until end of input.
pub fn serve_stream<R: BufRead, W: Write>(reader: R, mut writer: W) -> io::Result<()> {
    let mut session = Session::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let reply = session.handle_line(&line);
        writer.write_all(&to_line(&reply.body))?;
        writer.flush()?;
        if reply.close {
            break;
        }
    }
    Ok(())
}

/// Accepts connections forever, one thread and one isolated session each.
pub fn serve_tcp(listener: TcpListener) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        std::thread::spawn(move || {
            let peer = stream.peer_addr().ok();
            let result = stream
                .set_nodelay(true)
                .and_then(|()| stream.try_clone())
                .and_then(|w| serve_stream(BufReader::new(stream), w));
            if let Err(e) = result {
                log::warn!("connection {peer:?}: {e}");
            }
        });
    }
    Ok(())
}

/// Client for an external agent that answers `{"cmd":"act","obs":...}`
/// with `{"action": i}`.
pub struct AgentClient {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
}

impl AgentClient {
    pub fn connect(addr: impl ToSocketAddrs) -> io::Result<AgentClient> {
        let writer = TcpStream::connect(addr)?;
        writer.set_nodelay(true)?;
        let reader = BufReader::new(writer.try_clone()?);
        let mut client = AgentClient { reader, writer };
        let reply = client.request(&json!({ "cmd": "hello", "version": PROTOCOL_VERSION }))?;
        if reply.get("version").and_then(Value::as_u64) != Some(PROTOCOL_VERSION as u64) {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("agent refused handshake: {reply}"),
            ));
        }
        Ok(client)
    }

    fn request(&mut self, body: &Value) -> io::Result<Value> {
        self.writer.write_all(&to_line(body))?;
        let mut line = String::new();
        if self.reader.read_line(&mut line)? == 0 {
            return Err(io::Error::new(
                io::ErrorKind::UnexpectedEof,
                "agent closed the connection",
            ));
        }
        serde_json::from_str(&line).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }
}

impl ActionSource for AgentClient {
    fn act(&mut self, obs: &Observation<f64>) -> Option<usize> {
        match self.request(&json!({ "cmd": "act", "obs": obs })) {
            Ok(v) => v.get("action").and_then(Value::as_u64).map(|a| a as usize),
            Err(e) => {
                log::warn!("agent request failed: {e}");
                None
            }
        }
    }
}
