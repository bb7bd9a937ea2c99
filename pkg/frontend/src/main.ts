import { ApiClient } from "./api.js";
import { MapPanel } from "./map.js";
import { ControlPanels } from "./panels.js";
import { ParamsStore } from "./state.js";

async function boot(): Promise<void> {
  const api = new ApiClient("");
  const store = new ParamsStore(api);
  const scene = await api.getScene();
  await store.refresh();

  document.getElementById("scene-name")!.textContent = scene.name;
  const canvas = document.getElementById("map") as HTMLCanvasElement;
  new MapPanel(canvas, scene, store);
  new ControlPanels(api, store, scene);
  void store.refreshScore();
}

document.addEventListener("DOMContentLoaded", () => {
  void boot().catch((err) => {
    const bar = document.getElementById("error-bar");
    if (bar) {
      bar.textContent = `failed to load: ${err}`;
      bar.style.display = "block";
    }
  });
});
