import { ApiClient } from "./api.js";
import { App } from "./app.js";

const app = new App(new ApiClient(""));
void app.start();
