//! HTTP/JSON routes over [`Service`].

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::error::ApiError;
use crate::service::{Request, Service};

type Shared = State<Arc<Service>>;

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

type Reply = Result<Json<Value>, ApiError>;

pub fn router(service: Arc<Service>) -> Router {
    Router::new()
        .route("/bank/init", post(init_bank))
        .route("/bank/topup", post(top_up))
        .route("/accounts/buy", post(buy))
        .route("/accounts/withdraw", post(withdraw))
        .route("/accounts/{id}", get(account))
        .route("/loans", post(request_loan).get(list_loans))
        .route("/loans/{loan_id}/decision", post(decide_loan))
        .route("/loans/{loan_id}/repay", post(repay_loan))
        .route("/games/dice", post(dice))
        .route("/games/slots", post(slots))
        .route("/games/roulette", post(roulette))
        .route("/games/blackjack", post(blackjack_start))
        .route("/games/blackjack/{session}/hit", post(blackjack_hit))
        .route("/games/blackjack/{session}/stand", post(blackjack_stand))
        .route("/rounds/{round_id}", get(round))
        .route("/fairness/commitments/{id}", get(commitment))
        .route("/events", get(events))
        .route("/state/hash", get(state_hash))
        .with_state(service)
}

fn bearer(headers: &HeaderMap) -> Option<String> {
    let value = headers.get(header::AUTHORIZATION)?.to_str().ok()?;
    let token = value.strip_prefix("Bearer ").unwrap_or(value).trim();
    Some(token.to_string())
}

/// Parses a JSON body; an empty body reads as `{}`.
fn body<T: DeserializeOwned>(bytes: &Bytes) -> Result<T, ApiError> {
    let raw: &[u8] = if bytes.iter().all(u8::is_ascii_whitespace) {
        b"{}"
    } else {
        bytes
    };
    serde_json::from_slice(raw).map_err(|e| ApiError::invalid(format!("bad request body: {e}")))
}

fn path_id(raw: &str) -> Result<u64, ApiError> {
    raw.parse()
        .map_err(|_| ApiError::invalid(format!("'{raw}' is not a numeric id")))
}

/// Runs a mutating request on the blocking pool; the writer fsyncs.
async fn submit(
    service: Arc<Service>,
    headers: HeaderMap,
    kind: &'static str,
    request: Result<Request, ApiError>,
) -> Reply {
    let token = bearer(&headers);
    tokio::task::spawn_blocking(move || match request {
        Ok(req) => service.execute(token.as_deref(), req).map(Json),
        Err(e) => Err(service.reject(kind, e)),
    })
    .await
    .map_err(|e| ApiError::new("Internal", e.to_string()))?
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InitBody {
    investment: u64,
    #[serde(default)]
    rate: Option<u64>,
}

async fn init_bank(State(s): Shared, headers: HeaderMap, bytes: Bytes) -> Reply {
    let req = body::<InitBody>(&bytes).map(|b| Request::InitBank {
        investment: b.investment,
        rate: b.rate,
    });
    submit(s, headers, "initialize_bank", req).await
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AmountBody {
    amount: u64,
}

async fn top_up(State(s): Shared, headers: HeaderMap, bytes: Bytes) -> Reply {
    let req = body::<AmountBody>(&bytes).map(|b| Request::TopUp { amount: b.amount });
    submit(s, headers, "top_up_bank", req).await
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BuyBody {
    base_amount: u64,
}

async fn buy(State(s): Shared, headers: HeaderMap, bytes: Bytes) -> Reply {
    let req = body::<BuyBody>(&bytes).map(|b| Request::Buy {
        base_amount: b.base_amount,
    });
    submit(s, headers, "buy_tokens", req).await
}

async fn withdraw(State(s): Shared, headers: HeaderMap, bytes: Bytes) -> Reply {
    let req = body::<AmountBody>(&bytes).map(|b| Request::Withdraw { amount: b.amount });
    submit(s, headers, "withdraw_tokens", req).await
}

async fn account(State(s): Shared, headers: HeaderMap, Path(id): Path<String>) -> Reply {
    s.account(bearer(&headers).as_deref(), &id).map(Json)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LoanBody {
    principal: u64,
    rate_percent: u32,
}

async fn request_loan(State(s): Shared, headers: HeaderMap, bytes: Bytes) -> Reply {
    let req = body::<LoanBody>(&bytes).map(|b| Request::RequestLoan {
        principal: b.principal,
        rate_percent: b.rate_percent,
    });
    submit(s, headers, "request_loan", req).await
}

#[derive(Deserialize)]
struct LoanQuery {
    borrower: Option<String>,
}

async fn list_loans(State(s): Shared, headers: HeaderMap, Query(q): Query<LoanQuery>) -> Reply {
    s.loans(bearer(&headers).as_deref(), q.borrower.as_deref()).map(Json)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DecisionBody {
    accept: bool,
}

async fn decide_loan(
    State(s): Shared,
    headers: HeaderMap,
    Path(loan_id): Path<String>,
    bytes: Bytes,
) -> Reply {
    let req = path_id(&loan_id).and_then(|loan_id| {
        body::<DecisionBody>(&bytes).map(|b| Request::DecideLoan {
            loan_id,
            accept: b.accept,
        })
    });
    submit(s, headers, "decide_loan", req).await
}

async fn repay_loan(
    State(s): Shared,
    headers: HeaderMap,
    Path(loan_id): Path<String>,
    bytes: Bytes,
) -> Reply {
    let req = path_id(&loan_id).and_then(|loan_id| {
        body::<AmountBody>(&bytes).map(|b| Request::RepayLoan {
            loan_id,
            amount: b.amount,
        })
    });
    submit(s, headers, "repay_loan", req).await
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiceBody {
    guess: u64,
    stake: u64,
    #[serde(default)]
    client_seed: Option<String>,
}

async fn dice(State(s): Shared, headers: HeaderMap, bytes: Bytes) -> Reply {
    let req = body::<DiceBody>(&bytes).map(|b| Request::Dice {
        guess: b.guess,
        stake: b.stake,
        client_seed: b.client_seed,
    });
    submit(s, headers, "play_dice", req).await
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StakeBody {
    stake: u64,
    #[serde(default)]
    client_seed: Option<String>,
}

async fn slots(State(s): Shared, headers: HeaderMap, bytes: Bytes) -> Reply {
    let req = body::<StakeBody>(&bytes).map(|b| Request::Slots {
        stake: b.stake,
        client_seed: b.client_seed,
    });
    submit(s, headers, "play_slots", req).await
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RouletteBody {
    number: u64,
    color: String,
    stake: u64,
    #[serde(default)]
    client_seed: Option<String>,
}

async fn roulette(State(s): Shared, headers: HeaderMap, bytes: Bytes) -> Reply {
    let req = body::<RouletteBody>(&bytes).map(|b| Request::Roulette {
        number: b.number,
        color: b.color,
        stake: b.stake,
        client_seed: b.client_seed,
    });
    submit(s, headers, "play_roulette", req).await
}

async fn blackjack_start(State(s): Shared, headers: HeaderMap, bytes: Bytes) -> Reply {
    let req = body::<StakeBody>(&bytes).map(|b| Request::BlackjackStart {
        stake: b.stake,
        client_seed: b.client_seed,
    });
    submit(s, headers, "blackjack_start", req).await
}

async fn blackjack_hit(State(s): Shared, headers: HeaderMap, Path(session): Path<String>) -> Reply {
    let req = path_id(&session).map(|session_id| Request::BlackjackHit { session_id });
    submit(s, headers, "blackjack_hit", req).await
}

async fn blackjack_stand(State(s): Shared, headers: HeaderMap, Path(session): Path<String>) -> Reply {
    let req = path_id(&session).map(|session_id| Request::BlackjackStand { session_id });
    submit(s, headers, "blackjack_stand", req).await
}

async fn round(State(s): Shared, Path(id): Path<String>) -> Reply {
    s.round(path_id(&id)?).map(Json)
}

#[derive(Deserialize)]
struct CommitmentQuery {
    #[serde(default)]
    reveal: bool,
}

/// `{id}` may be `active`. With `?reveal=true` the commitment is revealed
/// (journaled) and a new one takes its place.
async fn commitment(
    State(s): Shared,
    headers: HeaderMap,
    Path(id): Path<String>,
    Query(q): Query<CommitmentQuery>,
) -> Reply {
    let id = if id == "active" {
        None
    } else {
        Some(path_id(&id)?)
    };
    if !q.reveal {
        return s.commitment(id).map(Json);
    }
    let commitment_id = match id {
        Some(id) => id,
        None => s.commitment(None)?["commitment_id"].as_u64().unwrap_or_default(),
    };
    let revealed = s.commitment(Some(commitment_id))?["revealed"] == Value::Bool(true);
    if revealed {
        return s.commitment(Some(commitment_id)).map(Json);
    }
    submit(s, headers, "reveal_commitment", Ok(Request::Reveal { commitment_id })).await
}

#[derive(Deserialize)]
struct EventsQuery {
    #[serde(default)]
    since: u64,
    #[serde(default)]
    limit: Option<usize>,
}

async fn events(State(s): Shared, Query(q): Query<EventsQuery>) -> Json<Value> {
    Json(s.events(q.since, q.limit.unwrap_or(crate::service::MAX_EVENT_PAGE)))
}

async fn state_hash(State(s): Shared) -> Json<Value> {
    Json(s.state_hash_view())
}

/// Binds `config.listen_addr` and serves until interrupted.
pub async fn serve(service: Arc<Service>, addr: std::net::SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("casino: listening on {}", listener.local_addr()?);
    axum::serve(listener, router(service))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
