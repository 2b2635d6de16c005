use std::time::Duration;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use futures::StreamExt;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use thue_arena::core::{
    encode_erase_log, encode_search_log, validate_log, Game, GameKind, GameRun, Mover, RandomSource,
    ScriptedBen, Symbol,
};
use thue_arena::formats::GameRunJson;
use thue_arena::server::{router, AppState};
use tokio_tungstenite::tungstenite::Message;
use tower::ServiceExt;

async fn call(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req
            .header("content-type", "application/json")
            .body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap()
    };
    (status, value)
}

async fn create(app: &Router, body: Value) -> (String, Value) {
    let (status, v) = call(app, Method::POST, "/sessions", Some(body)).await;
    assert_eq!(status, StatusCode::CREATED, "{v}");
    (v["session"]["id"].as_str().unwrap().to_string(), v)
}

async fn play(app: &Router, id: &str, symbol: u32) -> (StatusCode, Value) {
    call(app, Method::POST, &format!("/sessions/{id}/moves"), Some(json!({"symbol": symbol}))).await
}

fn error_code(v: &Value) -> &str {
    v["error"]["code"].as_str().unwrap()
}

fn word(v: &Value) -> Vec<u32> {
    serde_json::from_value(v["word"].clone()).unwrap()
}

#[tokio::test]
async fn fresh_sessions_open_with_ann() {
    let app = router(AppState::default());
    for (game, c) in [("erase", 8), ("nonrep", 6)] {
        let (id, v) = create(&app, json!({"game": game, "symbols": c, "seed": 1})).await;
        let s = &v["session"];
        assert_eq!(s["status"], "awaiting_human");
        assert_eq!(s["whose_turn"], "B");
        assert_eq!(word(s).len(), 1);
        let events = v["events"].as_array().unwrap();
        assert_eq!(events[0]["type"], "appended");
        assert_eq!(events[0]["mover"], "A");
        assert_eq!(events.last().unwrap()["type"], "state");

        let (status, snap) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(word(&snap).len(), 1);
    }
}

#[tokio::test]
async fn invalid_configs_are_rejected() {
    let app = router(AppState::default());
    for body in [
        json!({"game": "erase", "symbols": 3, "seed": 1}),
        json!({"game": "nonrep", "symbols": 2}),
        json!({"game": "chess"}),
        json!({"game": "erase", "budget": 7}),
    ] {
        let (status, v) = call(&app, Method::POST, "/sessions", Some(body.clone())).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{body} -> {v}");
        assert_eq!(error_code(&v), "invalid_config");
    }
}

#[tokio::test]
async fn error_codes_are_distinct() {
    let app = router(AppState::default());
    let (status, v) = play(&app, "nope", 0).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(error_code(&v), "unknown_session");
    let (status, v) = call(&app, Method::GET, "/sessions/nope", None).await;
    assert_eq!((status, error_code(&v)), (StatusCode::NOT_FOUND, "unknown_session"));

    let (id, _) = create(&app, json!({"game": "erase", "seed": 5})).await;
    let (status, v) = play(&app, &id, 8).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(error_code(&v), "symbol_out_of_range");

    let uri = format!("/sessions/{id}/moves");
    let (status, v) = call(&app, Method::POST, &uri, Some(json!({"symbol": 0, "mover": "A"}))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(error_code(&v), "out_of_turn");

    // rejected moves leave the session untouched
    let (_, snap) = call(&app, Method::GET, &format!("/sessions/{id}"), None).await;
    assert_eq!(word(&snap).len(), 1);

    let (status, _) = call(&app, Method::DELETE, &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    let (status, v) = play(&app, &id, 0).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(error_code(&v), "session_finished");
    assert_eq!(v["error"]["message"], "session finished");
}

#[tokio::test]
async fn mimicking_ann_in_erase_erases_one_symbol() {
    let app = router(AppState::default());
    let (id, v) = create(&app, json!({"game": "erase", "symbols": 8, "seed": 1})).await;
    let last = *word(&v["session"]).last().unwrap();
    let (status, v) = play(&app, &id, last).await;
    assert_eq!(status, StatusCode::OK, "{v}");
    let events = v["events"].as_array().unwrap();
    assert_eq!(events[0], json!({"type": "appended", "id": events[0]["id"], "move_index": 2, "mover": "B", "symbol": last}));
    assert_eq!(events[1]["type"], "erased");
    assert_eq!(events[1]["size"], 1);
    // Ann replies, so the word is back to length 2 before the human's next turn
    assert_eq!(events[2]["mover"], "A");
    assert_eq!(v["session"]["lengths"]["word"], 2);
}

#[tokio::test]
async fn nonrep_parity_decides_the_mover() {
    let app = router(AppState::default());
    let (id, _) = create(&app, json!({"game": "nonrep", "symbols": 6, "seed": 9})).await;
    for i in 0..200u32 {
        let (status, v) = play(&app, &id, (i * 7) % 6).await;
        assert_eq!(status, StatusCode::OK, "{v}");
        let mut prev_id = None;
        for e in v["events"].as_array().unwrap() {
            let eid = e["id"].as_u64().unwrap();
            assert!(prev_id.is_none_or(|p| eid == p + 1), "event ids must be consecutive");
            prev_id = Some(eid);
            if e["type"] == "backtracked" {
                assert!(e["size"].as_u64().unwrap() >= 5);
            }
            if e["type"] == "state" {
                let len = e["lengths"]["word"].as_u64().unwrap();
                let ann_turn = e["whose_turn"] == "A";
                assert_eq!(len % 2 == 0, ann_turn);
                assert_eq!(e["whose_turn"], "B");
            }
        }
    }
}

#[tokio::test]
async fn snapshot_is_stable() {
    let app = router(AppState::default());
    let (id, _) = create(&app, json!({"game": "erase", "seed": 3})).await;
    play(&app, &id, 2).await;
    let uri = format!("/sessions/{id}");
    let (_, a) = call(&app, Method::GET, &uri, None).await;
    let (_, b) = call(&app, Method::GET, &uri, None).await;
    assert_eq!(a, b);
    assert_eq!(a["id"], id);
}

#[tokio::test]
async fn budget_finishes_the_session() {
    let app = router(AppState::default());
    let (id, _) = create(&app, json!({"game": "erase", "seed": 3, "budget": 4})).await;
    let (_, v) = play(&app, &id, 0).await;
    assert_eq!(v["session"]["status"], "awaiting_human");
    let (_, v) = play(&app, &id, 1).await;
    assert_eq!(v["session"]["status"], "finished");
    assert_eq!(v["session"]["whose_turn"], Value::Null);
    assert_eq!(v["session"]["lengths"]["moves"], 4);
    let (status, v) = play(&app, &id, 1).await;
    assert_eq!((status, error_code(&v)), (StatusCode::CONFLICT, "session_finished"));
}

fn scripted_replay(run: &GameRun) -> GameRun {
    let human: Vec<Symbol> = run
        .moves
        .iter()
        .filter(|m| m.mover == Mover::Ben)
        .map(|m| m.symbol)
        .collect();
    let mut ben = ScriptedBen::new(human).with_label("human");
    let mut rng = RandomSource::new(run.config.seed.unwrap());
    let mut game = Game::new(run.config.kind, run.config.alphabet_size).unwrap();
    while game.moves().len() < run.moves.len() {
        match game.whose_turn() {
            Mover::Ann => game.ann_move(&mut rng).unwrap(),
            Mover::Ben => game.ben_move(&mut ben).unwrap(),
        };
    }
    game.into_run(run.config.clone())
}

#[tokio::test]
async fn export_validates_and_replays_offline() {
    let dir = tempfile::tempdir().unwrap();
    let app = router(AppState {
        export_dir: Some(dir.path().to_path_buf()),
        ..AppState::default()
    });
    for (game, c) in [("erase", 8u32), ("nonrep", 6)] {
        let (id, _) = create(&app, json!({"game": game, "symbols": c, "seed": 42})).await;
        for i in 0..150u32 {
            let (status, v) = play(&app, &id, (i * i + 3) % c).await;
            assert_eq!(status, StatusCode::OK, "{v}");
        }
        let (status, exported) = call(&app, Method::DELETE, &format!("/sessions/{id}"), None).await;
        assert_eq!(status, StatusCode::OK);
        assert_eq!(exported["config"]["ben"], "human");

        let on_disk: Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join(format!("{id}.json"))).unwrap())
                .unwrap();
        assert_eq!(on_disk, exported);

        let parsed: GameRunJson = serde_json::from_value(exported).unwrap();
        let run = GameRun::try_from(&parsed).unwrap();
        match run.config.kind {
            GameKind::Erase => {
                let log = encode_erase_log(&run).unwrap();
                assert!(validate_log(&log).is_empty());
            }
            GameKind::Nonrep => {
                let log = encode_search_log(&run).unwrap();
                assert!(validate_log(&log).is_empty());
            }
        }

        let replayed = scripted_replay(&run);
        assert_eq!(replayed.final_word, run.final_word);
        assert_eq!(replayed.moves, run.moves);
        assert_eq!(replayed.ann_choices, run.ann_choices);
    }
}

#[tokio::test]
async fn nonrep_export_matches_the_search_simulator() {
    let app = router(AppState::default());
    let (id, _) = create(&app, json!({"game": "nonrep", "symbols": 6, "seed": 77})).await;
    for i in 0..100u32 {
        play(&app, &id, i % 6).await;
    }
    let (_, exported) = call(&app, Method::DELETE, &format!("/sessions/{id}"), None).await;
    let run = GameRun::try_from(&serde_json::from_value::<GameRunJson>(exported).unwrap()).unwrap();
    let human: Vec<Symbol> = run.moves.iter().filter(|m| m.mover == Mover::Ben).map(|m| m.symbol).collect();
    let offline = thue_arena::core::engine::simulate_nonrep_search_with(
        6,
        run.ann_choices.len(),
        &mut ScriptedBen::new(human).with_label("human"),
        &mut RandomSource::new(77),
    )
    .unwrap();
    assert_eq!(offline.final_word, run.final_word);
    assert_eq!(offline.moves, run.moves);
}

type Ws = tokio_tungstenite::WebSocketStream<tokio_tungstenite::MaybeTlsStream<tokio::net::TcpStream>>;

async fn next_event(ws: &mut Ws) -> Value {
    let msg = tokio::time::timeout(Duration::from_secs(5), ws.next())
        .await
        .expect("event within 5s")
        .unwrap()
        .unwrap();
    match msg {
        Message::Text(t) => serde_json::from_str(&t).unwrap(),
        other => panic!("unexpected frame {other:?}"),
    }
}

#[tokio::test]
async fn websocket_streams_events_in_order() {
    let state = AppState::default();
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let app = router(state);
    let server_app = app.clone();
    tokio::spawn(async move { axum::serve(listener, server_app).await.unwrap() });

    let (id, _) = create(&app, json!({"game": "erase", "seed": 11})).await;
    let (mut ws, _) = tokio_tungstenite::connect_async(format!("ws://{addr}/sessions/{id}/events"))
        .await
        .unwrap();

    let hello = next_event(&mut ws).await;
    assert_eq!(hello["type"], "state");
    assert_eq!(hello["id"], Value::Null);
    assert_eq!(word(&hello).len(), 1);

    let (_, reply) = play(&app, &id, 4).await;
    for expected in reply["events"].as_array().unwrap() {
        assert_eq!(&next_event(&mut ws).await, expected);
    }
    let (_, reply) = play(&app, &id, 5).await;
    for expected in reply["events"].as_array().unwrap() {
        assert_eq!(&next_event(&mut ws).await, expected);
    }
}

#[tokio::test]
async fn websocket_unknown_session_is_404() {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(async move { axum::serve(listener, router(AppState::default())).await.unwrap() });
    let err = tokio_tungstenite::connect_async(format!("ws://{addr}/sessions/missing/events"))
        .await
        .unwrap_err();
    match err {
        tokio_tungstenite::tungstenite::Error::Http(resp) => assert_eq!(resp.status(), 404),
        other => panic!("unexpected {other:?}"),
    }
}

#[tokio::test]
async fn sessions_are_independent() {
    let app = router(AppState::default());
    let (a, _) = create(&app, json!({"game": "erase", "seed": 1})).await;
    let (b, _) = create(&app, json!({"game": "erase", "seed": 1})).await;
    assert_ne!(a, b);
    let (ra, rb) = tokio::join!(play(&app, &a, 3), play(&app, &b, 3));
    assert_eq!(ra.0, StatusCode::OK);
    assert_eq!(ra.1["session"]["word"], rb.1["session"]["word"]);
}
