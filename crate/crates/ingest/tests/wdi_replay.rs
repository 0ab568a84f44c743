//! WDI client against a local server replaying recorded response bodies.

use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::sync::{Arc, Mutex};
use std::thread;

use serde_json::Value;
use vecmkit_ingest::{Cache, IngestError, WdiClient, WdiQuery};

const FIXTURE: &str = include_str!("fixtures/wdi_bgd_gdp_2004_2021.json");

type Handler = dyn Fn(&str) -> (u16, String) + Send + Sync;

struct Replay {
    base_url: String,
    requests: Arc<Mutex<Vec<String>>>,
}

fn serve(handler: Box<Handler>) -> Replay {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let base_url = format!("http://{}/v2", listener.local_addr().unwrap());
    let requests = Arc::new(Mutex::new(Vec::new()));
    let log = requests.clone();
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(mut stream) = stream else { break };
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut request_line = String::new();
            reader.read_line(&mut request_line).unwrap();
            loop {
                let mut header = String::new();
                if reader.read_line(&mut header).unwrap() == 0 || header == "\r\n" {
                    break;
                }
            }
            let target = request_line.split_whitespace().nth(1).unwrap_or("").to_string();
            log.lock().unwrap().push(target.clone());
            let (status, body) = handler(&target);
            let reply = format!(
                "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
                body.len()
            );
            let _ = stream.write_all(reply.as_bytes());
        }
    });
    Replay { base_url, requests }
}

fn gdp_query() -> WdiQuery {
    WdiQuery::new("BGD", "NY.GDP.MKTP.CD", 2004, 2021)
}

#[test]
fn fetches_eighteen_increasing_years() {
    let server = serve(Box::new(|_| (200, FIXTURE.to_string())));
    let dir = tempfile::tempdir().unwrap();
    let client = WdiClient::new(&server.base_url).with_cache(Cache::new(dir.path()));
    let s = client.fetch(&gdp_query()).unwrap();
    assert_eq!(s.len(), 18);
    assert_eq!((s.start_year(), s.end_year()), (2004, 2021));
    assert!(s.values().windows(2).all(|w| w[1] > w[0]));
    let requests = server.requests.lock().unwrap();
    assert_eq!(
        requests[0],
        "/v2/country/BGD/indicator/NY.GDP.MKTP.CD?format=json&per_page=1000&date=2004:2021"
    );
}

#[test]
fn second_call_is_served_from_cache() {
    let server = serve(Box::new(|_| (200, FIXTURE.to_string())));
    let dir = tempfile::tempdir().unwrap();
    let client = WdiClient::new(&server.base_url).with_cache(Cache::new(dir.path()));
    let first = client.fetch(&gdp_query()).unwrap();
    let second = client.fetch(&gdp_query()).unwrap();
    assert_eq!(first, second);
    assert_eq!(client.requests_made(), 1);
    assert_eq!(server.requests.lock().unwrap().len(), 1);
    assert!(dir.path().join("wdi/BGD/NY.GDP.MKTP.CD/2004-2021.csv").exists());
    assert!(dir.path().join("wdi/BGD/NY.GDP.MKTP.CD/2004-2021.meta.json").exists());

    // A fresh offline client sees the same payload without touching the network.
    let offline = WdiClient::new("http://127.0.0.1:9").with_cache(Cache::new(dir.path())).offline(true);
    assert_eq!(offline.fetch(&gdp_query()).unwrap(), first);
}

#[test]
fn concurrent_fetches_of_one_key_hit_the_network_once() {
    let server = serve(Box::new(|_| (200, FIXTURE.to_string())));
    let dir = tempfile::tempdir().unwrap();
    let client = Arc::new(WdiClient::new(&server.base_url).with_cache(Cache::new(dir.path())));
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let c = client.clone();
            thread::spawn(move || c.fetch(&gdp_query()).unwrap())
        })
        .collect();
    let results: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    assert!(results.windows(2).all(|w| w[0] == w[1]));
    assert_eq!(client.requests_made(), 1);
}

#[test]
fn follows_pagination() {
    let full: Value = serde_json::from_str(FIXTURE).unwrap();
    let rows = full[1].as_array().unwrap().clone();
    let server = serve(Box::new(move |target| {
        let page = if target.contains("&page=2") { 2 } else { 1 };
        let slice = if page == 1 { &rows[..10] } else { &rows[10..] };
        let meta = serde_json::json!({"page": page, "pages": 2, "per_page": 10, "total": rows.len()});
        (200, serde_json::json!([meta, slice]).to_string())
    }));
    let client = WdiClient::new(&server.base_url);
    let s = client.fetch(&gdp_query()).unwrap();
    assert_eq!(s.len(), 18);
    assert_eq!(client.requests_made(), 2);
}

#[test]
fn unknown_indicator_is_reported() {
    let server = serve(Box::new(|_| {
        (
            200,
            r#"[{"message":[{"id":"120","key":"Invalid value","value":"The provided parameter value is not valid"}]}]"#
                .to_string(),
        )
    }));
    let client = WdiClient::new(&server.base_url);
    let err = client.fetch(&WdiQuery::new("BGD", "NOT.A.CODE", 2004, 2021)).unwrap_err();
    assert!(matches!(err, IngestError::SchemaError(_)), "{err}");

    let empty = serve(Box::new(|_| (200, r#"[{"page":0,"pages":0,"per_page":1000,"total":0},null]"#.to_string())));
    let err = WdiClient::new(&empty.base_url)
        .fetch(&WdiQuery::new("BGD", "NOT.A.CODE", 2004, 2021))
        .unwrap_err();
    assert!(matches!(err, IngestError::NoData(_)), "{err}");
}

#[test]
fn null_values_name_the_years() {
    let mut full: Value = serde_json::from_str(FIXTURE).unwrap();
    for row in full[1].as_array_mut().unwrap() {
        if row["date"] == "2010" || row["date"] == "2004" {
            row["value"] = Value::Null;
        }
    }
    let body = full.to_string();
    let server = serve(Box::new(move |_| (200, body.clone())));
    let dir = tempfile::tempdir().unwrap();
    let client = WdiClient::new(&server.base_url).with_cache(Cache::new(dir.path()));
    match client.fetch(&gdp_query()) {
        Err(IngestError::NullObservations(years)) => assert_eq!(years, vec![2004, 2010]),
        other => panic!("{other:?}"),
    }
    assert!(!dir.path().join("wdi").exists(), "failed fetch must not be cached");
}

#[test]
fn http_status_is_surfaced() {
    let server = serve(Box::new(|_| (503, "unavailable".to_string())));
    match WdiClient::new(&server.base_url).fetch(&gdp_query()) {
        Err(IngestError::HttpError { status, .. }) => assert_eq!(status, 503),
        other => panic!("{other:?}"),
    }
}

#[test]
fn unreachable_endpoint_is_a_network_error() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    drop(listener);
    let err = WdiClient::new(&format!("http://{addr}")).fetch(&gdp_query()).unwrap_err();
    assert!(matches!(err, IngestError::Network(_)), "{err}");
}

// Needs internet access: cargo test -p vecmkit-ingest -- --ignored live
#[test]
#[ignore]
fn live_world_bank_smoke() {
    let s = WdiClient::default().fetch(&gdp_query()).unwrap();
    assert_eq!(s.len(), 18);
}
