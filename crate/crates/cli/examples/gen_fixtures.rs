//! Regenerates the bundled PNG fixtures under `fixtures/` from the
//! deterministic generators. Run from the workspace root:
//!
//! ```text
//! cargo run -p ostce-cli --example gen_fixtures
//! ```

use std::path::Path;

use ostce_cli::io::save_png;
use ostce_core::synth;

const BG_W: usize = 96;
const BG_H: usize = 64;

fn main() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../..");
    let bg_dir = root.join("fixtures/backgrounds");
    let virt_dir = root.join("fixtures/virtual");
    std::fs::create_dir_all(&bg_dir).expect("create fixtures/backgrounds");
    std::fs::create_dir_all(&virt_dir).expect("create fixtures/virtual");

    for (idx, (name, img)) in synth::fixture_backgrounds(BG_W, BG_H).iter().enumerate() {
        let path = bg_dir.join(format!("bg{:02}_{}.png", idx + 1, name));
        save_png(&path, img).expect("write background fixture");
        println!("wrote {}", path.display());
    }

    let hud = synth::hud_panel(BG_W, BG_H);
    let path = virt_dir.join("hud.png");
    save_png(&path, &hud).expect("write hud fixture");
    println!("wrote {}", path.display());

    let shapes = synth::shapes_panel(BG_W, BG_H);
    let path = virt_dir.join("shapes.png");
    save_png(&path, &shapes).expect("write shapes fixture");
    println!("wrote {}", path.display());
}
