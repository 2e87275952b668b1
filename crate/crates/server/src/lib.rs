//! Read-only HTTP/JSON service over a sealed index.
//!
//! All routes live under `/v1`. Scaffold keys in paths are canonical
//! scaffold SMILES, percent-encoded; the empty scaffold is addressed as
//! `S_0`.

mod error;

pub use error::{ApiError, ApiErrorCode};

use std::future::Future;
use std::net::SocketAddr;
use std::sync::{Arc, OnceLock};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, State};
use axum::http::Method;
use axum::routing::{get, post};
use axum::{Json, Router};
use scafnav_core::algebra::{
    fbdd_intersection, fbdd_search, lower_cone_indexed, union_scaffolds, upper_cone, ConeCaps,
};
use scafnav_core::index::{HypergraphIndex, ScaffoldId, ScaffoldSummary};
use scafnav_core::mcs::{intersection, McsSummary, DEFAULT_MCS_BUDGET};
use scafnav_core::scaffold::{scaffold_key, Scaffold};
use scafnav_core::stats::{CorpusStats, StatsOptions};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;
use tokio::net::TcpListener;
use tower_http::cors::{Any, CorsLayer};

/// Path token for the empty scaffold.
pub const EMPTY_SCAFFOLD_TOKEN: &str = "S_0";
pub const DEFAULT_PAGE: usize = 100;
pub const MAX_PAGE: usize = 10_000;
pub const MAX_CONE_DEPTH: usize = 32;
pub const MAX_MCS_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("cannot bind {addr}: {source}")]
    Bind {
        addr: SocketAddr,
        #[source]
        source: std::io::Error,
    },
    #[error("server failed: {0}")]
    Io(#[from] std::io::Error),
}

/// Shared, immutable request state.
pub struct AppState {
    index: HypergraphIndex,
    stats: OnceLock<Value>,
}

impl AppState {
    pub fn new(index: HypergraphIndex) -> Self {
        AppState {
            index,
            stats: OnceLock::new(),
        }
    }

    pub fn index(&self) -> &HypergraphIndex {
        &self.index
    }

    /// The same document `scafnav stats --format json` prints with default
    /// options.
    pub fn stats(&self) -> &Value {
        self.stats.get_or_init(|| {
            serde_json::to_value(CorpusStats::compute(&self.index, &StatsOptions::default()))
                .expect("stats serialize")
        })
    }
}

type Shared = Arc<AppState>;

pub fn router(state: Shared) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(Any)
        .allow_methods([Method::GET, Method::POST, Method::OPTIONS])
        .allow_headers(Any);
    Router::new()
        .route("/v1/healthz", get(healthz))
        .route("/v1/stats", get(stats))
        .route("/v1/scaffold", get(project))
        .route("/v1/scaffold/{key}/expand", get(expand))
        .route("/v1/scaffold/{key}/successors", get(successors))
        .route("/v1/scaffold/{key}/predecessors", get(predecessors))
        .route("/v1/scaffold/{key}/uppercone", get(uppercone))
        .route("/v1/scaffold/{key}/lowercone", get(lowercone))
        .route("/v1/hierarchy/{n}", get(hierarchy))
        .route("/v1/mcs", post(mcs))
        .route("/v1/union", post(union))
        .route("/v1/fbdd", post(fbdd))
        .layer(cors)
        .with_state(state)
}

/// Serve `index` on `listener` until `shutdown` resolves, then drain
/// in-flight requests.
pub async fn serve_with_shutdown<F>(index: HypergraphIndex, listener: TcpListener, shutdown: F) -> Result<(), ServeError>
where
    F: Future<Output = ()> + Send + 'static,
{
    let app = router(Arc::new(AppState::new(index)));
    axum::serve(listener, app).with_graceful_shutdown(shutdown).await?;
    Ok(())
}

/// Bind `addr` and serve until Ctrl-C or SIGTERM.
pub async fn serve(index: HypergraphIndex, addr: SocketAddr) -> Result<(), ServeError> {
    let listener = TcpListener::bind(addr)
        .await
        .map_err(|source| ServeError::Bind { addr, source })?;
    serve_with_shutdown(index, listener, shutdown_signal()).await
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
}

fn query<T>(q: Result<Query<T>, QueryRejection>) -> Result<T, ApiError> {
    q.map(|Query(t)| t).map_err(|e| ApiError::bad_request(e.body_text()))
}

fn body<T>(b: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    b.map(|Json(t)| t).map_err(|e| ApiError::bad_request(e.body_text()))
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> Result<T, ApiError> + Send + 'static) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
}

fn resolve_key(idx: &HypergraphIndex, key: &str) -> Result<ScaffoldId, ApiError> {
    let key = if key == EMPTY_SCAFFOLD_TOKEN { "" } else { key };
    Ok(idx.resolve(key)?)
}

fn summaries(idx: &HypergraphIndex, ids: &[ScaffoldId]) -> Result<Vec<ScaffoldSummary>, ApiError> {
    ids.iter().map(|&id| idx.summary(id).map_err(ApiError::from)).collect()
}

fn encode_cursor(offset: usize) -> String {
    hex::encode((offset as u64).to_be_bytes())
}

fn decode_cursor(cursor: &str) -> Result<usize, ApiError> {
    let bytes: [u8; 8] = hex::decode(cursor)
        .ok()
        .and_then(|b| b.try_into().ok())
        .ok_or_else(|| ApiError::bad_request("invalid cursor"))?;
    Ok(u64::from_be_bytes(bytes) as usize)
}

#[derive(Debug, Default, Deserialize)]
struct PageParams {
    limit: Option<usize>,
    cursor: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct Page<T> {
    pub items: Vec<T>,
    pub total: usize,
    pub next_cursor: Option<String>,
}

fn paginate<T: Clone>(all: &[T], p: &PageParams) -> Result<Page<T>, ApiError> {
    let limit = p.limit.unwrap_or(DEFAULT_PAGE);
    if limit == 0 || limit > MAX_PAGE {
        return Err(ApiError::bad_request(format!("limit must be in 1..={MAX_PAGE}")));
    }
    let start = match &p.cursor {
        Some(c) => decode_cursor(c)?,
        None => 0,
    };
    if start > all.len() {
        return Err(ApiError::bad_request("cursor past end"));
    }
    let end = (start + limit).min(all.len());
    Ok(Page {
        items: all[start..end].to_vec(),
        total: all.len(),
        next_cursor: (end < all.len()).then(|| encode_cursor(end)),
    })
}

async fn healthz(State(st): State<Shared>) -> Json<Value> {
    Json(json!({ "status": "ok", "index_manifest": st.index.manifest() }))
}

async fn stats(State(st): State<Shared>) -> Result<Json<Value>, ApiError> {
    blocking(move || Ok(Json(st.stats().clone()))).await
}

#[derive(Debug, Deserialize)]
struct SmilesParam {
    smiles: String,
}

/// Projection of a SMILES onto its scaffold. `indexed` is false when the
/// scaffold is not in the index, in which case the counts are zero.
#[derive(Debug, Serialize)]
pub struct Projection {
    pub scaffold: String,
    pub ring_count: u32,
    pub class_size: usize,
    #[serde(rename = "virtual")]
    pub is_virtual: bool,
    pub indexed: bool,
    pub out_degree: usize,
    pub in_degree: usize,
}

async fn project(
    State(st): State<Shared>,
    q: Result<Query<SmilesParam>, QueryRejection>,
) -> Result<Json<Projection>, ApiError> {
    let q = query(q)?;
    let s = scaffold_key(&q.smiles)?;
    let idx = &st.index;
    Ok(Json(match idx.lookup(&s.key) {
        Some(id) => {
            let sum = idx.summary(id)?;
            Projection {
                scaffold: sum.scaffold.into_string(),
                ring_count: sum.ring_count,
                class_size: sum.class_size,
                is_virtual: sum.is_virtual,
                indexed: true,
                out_degree: sum.out_degree,
                in_degree: sum.in_degree,
            }
        }
        None => Projection {
            scaffold: s.key.into_string(),
            ring_count: s.ring_count,
            class_size: 0,
            is_virtual: false,
            indexed: false,
            out_degree: 0,
            in_degree: 0,
        },
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct Member {
    pub id: u32,
    pub smiles: String,
    pub source_tag: Option<String>,
}

async fn expand(
    State(st): State<Shared>,
    Path(key): Path<String>,
    q: Result<Query<PageParams>, QueryRejection>,
) -> Result<Json<Value>, ApiError> {
    let q = query(q)?;
    let idx = &st.index;
    let id = resolve_key(idx, &key)?;
    let class = idx.class(id)?;
    let members: Vec<Member> = class
        .members
        .iter()
        .map(|&m| {
            let r = &idx.molecules()[m as usize];
            Member {
                id: r.id,
                smiles: r.canonical.as_str().to_string(),
                source_tag: r.source_tag.clone(),
            }
        })
        .collect();
    let page = paginate(&members, &q)?;
    Ok(Json(json!({ "scaffold": idx.summary(id)?, "members": page })))
}

async fn successors(State(st): State<Shared>, Path(key): Path<String>) -> Result<Json<Value>, ApiError> {
    let idx = &st.index;
    let id = resolve_key(idx, &key)?;
    Ok(Json(json!({ "scaffold": idx.summary(id)?, "successors": summaries(idx, idx.successor_ids(id))? })))
}

async fn predecessors(State(st): State<Shared>, Path(key): Path<String>) -> Result<Json<Value>, ApiError> {
    let idx = &st.index;
    let id = resolve_key(idx, &key)?;
    Ok(Json(json!({ "scaffold": idx.summary(id)?, "predecessors": summaries(idx, idx.predecessor_ids(id))? })))
}

#[derive(Debug, Deserialize)]
struct ConeParams {
    max_depth: Option<usize>,
    limit: Option<usize>,
    cursor: Option<String>,
}

#[derive(Clone, Copy)]
enum ConeDir {
    Up,
    Down,
}

async fn cone(st: Shared, key: String, q: ConeParams, dir: ConeDir) -> Result<Json<Value>, ApiError> {
    let mut caps = ConeCaps::default();
    if let Some(d) = q.max_depth {
        if d > MAX_CONE_DEPTH {
            return Err(ApiError::bad_request(format!("max_depth must be at most {MAX_CONE_DEPTH}")));
        }
        caps.max_depth = d;
    }
    blocking(move || {
        let idx = &st.index;
        let id = resolve_key(idx, &key)?;
        let root = idx.scaffold(id)?.clone();
        let r = match dir {
            ConeDir::Up => upper_cone(idx, &root, caps)?,
            ConeDir::Down => lower_cone_indexed(idx, &root, caps)?,
        };
        let page = paginate(
            &r.member_ids,
            &PageParams {
                limit: q.limit,
                cursor: q.cursor,
            },
        )?;
        Ok(Json(json!({
            "root": idx.summary(id)?,
            "members": Page {
                items: summaries(idx, &page.items)?,
                total: page.total,
                next_cursor: page.next_cursor,
            },
            "max_depth": caps.max_depth,
            "truncated": r.truncated,
        })))
    })
    .await
}

async fn uppercone(
    State(st): State<Shared>,
    Path(key): Path<String>,
    q: Result<Query<ConeParams>, QueryRejection>,
) -> Result<Json<Value>, ApiError> {
    cone(st, key, query(q)?, ConeDir::Up).await
}

async fn lowercone(
    State(st): State<Shared>,
    Path(key): Path<String>,
    q: Result<Query<ConeParams>, QueryRejection>,
) -> Result<Json<Value>, ApiError> {
    cone(st, key, query(q)?, ConeDir::Down).await
}

async fn hierarchy(
    State(st): State<Shared>,
    Path(n): Path<String>,
    q: Result<Query<PageParams>, QueryRejection>,
) -> Result<Json<Value>, ApiError> {
    let n: u32 = n.parse().map_err(|_| ApiError::bad_request("level must be a non-negative integer"))?;
    let q = query(q)?;
    let idx = &st.index;
    let page = paginate(idx.hierarchy(n), &q)?;
    Ok(Json(json!({
        "level": n,
        "scaffolds": Page {
            items: summaries(idx, &page.items)?,
            total: page.total,
            next_cursor: page.next_cursor,
        },
    })))
}

#[derive(Debug, Deserialize)]
struct McsBody {
    s1: String,
    s2: String,
    budget: Option<u64>,
}

/// Both inputs are projected to scaffolds first; the index is not
/// consulted.
async fn mcs(b: Result<Json<McsBody>, JsonRejection>) -> Result<Json<McsSummary>, ApiError> {
    let b = body(b)?;
    let budget = b.budget.unwrap_or(DEFAULT_MCS_BUDGET);
    if budget == 0 || budget > MAX_MCS_BUDGET {
        return Err(ApiError::bad_request(format!("budget must be in 1..={MAX_MCS_BUDGET}")));
    }
    blocking(move || {
        let s1 = scaffold_key(&b.s1)?;
        let s2 = scaffold_key(&b.s2)?;
        let r = intersection(&s1, &s2, budget)?;
        Ok(Json(McsSummary::from(&r)))
    })
    .await
}

#[derive(Debug, Deserialize)]
struct UnionBody {
    s1: String,
    s2: String,
}

fn indexed_scaffold(idx: &HypergraphIndex, smiles: &str) -> Result<Scaffold, ApiError> {
    let s = scaffold_key(smiles)?;
    let id = idx
        .lookup(&s.key)
        .ok_or_else(|| ApiError::new(ApiErrorCode::UnknownScaffold, format!("scaffold {:?} is not in the index", s.key.as_str())))?;
    Ok(idx.scaffold(id)?.clone())
}

async fn union(State(st): State<Shared>, b: Result<Json<UnionBody>, JsonRejection>) -> Result<Json<Value>, ApiError> {
    let b = body(b)?;
    let idx = &st.index;
    let s1 = indexed_scaffold(idx, &b.s1)?;
    let s2 = indexed_scaffold(idx, &b.s2)?;
    let ids: Vec<ScaffoldId> = union_scaffolds(idx, &s1, &s2)?
        .iter()
        .map(|s| idx.id_of(s))
        .collect::<Result<_, _>>()?;
    Ok(Json(json!({ "s1": s1.key, "s2": s2.key, "scaffolds": summaries(idx, &ids)? })))
}

#[derive(Debug, Deserialize)]
struct FbddBody {
    hits: Vec<String>,
    subset: Option<Vec<usize>>,
    #[serde(default)]
    search: bool,
    min_subset_size: Option<usize>,
    max_depth: Option<usize>,
}

async fn fbdd(State(st): State<Shared>, b: Result<Json<FbddBody>, JsonRejection>) -> Result<Json<Value>, ApiError> {
    let b = body(b)?;
    if b.hits.is_empty() {
        return Err(ApiError::bad_request("hits must not be empty"));
    }
    let mut caps = ConeCaps::default();
    if let Some(d) = b.max_depth {
        if d > MAX_CONE_DEPTH {
            return Err(ApiError::bad_request(format!("max_depth must be at most {MAX_CONE_DEPTH}")));
        }
        caps.max_depth = d;
    }
    blocking(move || {
        let idx = &st.index;
        if b.search {
            let found = fbdd_search(idx, &b.hits, b.min_subset_size.unwrap_or(1), caps)?;
            Ok(Json(json!({ "results": found })))
        } else {
            let r = fbdd_intersection(idx, &b.hits, b.subset.as_deref(), caps)?;
            Ok(Json(serde_json::to_value(r).expect("serialize")))
        }
    })
    .await
}
