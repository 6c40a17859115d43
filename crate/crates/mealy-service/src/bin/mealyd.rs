//! Workbench daemon: serves the Mealy automaton API over HTTP.

use clap::Parser;

#[derive(Parser)]
#[command(name = "mealyd", about = "HTTP service for the Mealy automaton workbench")]
struct Args {
    /// Address to bind.
    #[arg(long, default_value = "127.0.0.1:8787")]
    addr: String,
}

#[tokio::main]
async fn main() {
    let args = Args::parse();
    let listener = match tokio::net::TcpListener::bind(&args.addr).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("mealyd: cannot bind {}: {e}", args.addr);
            std::process::exit(1);
        }
    };
    let addr = listener.local_addr().expect("bound listener has an address");
    println!("mealyd listening on http://{addr}");
    if let Err(e) = axum::serve(listener, mealy_service::router()).await {
        eprintln!("mealyd: server error: {e}");
        std::process::exit(1);
    }
}
