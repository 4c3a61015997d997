// WebExtension entry: install the shield before any page script runs.
import { defaultWindow } from "./env.js";
import { shield } from "./shield.js";

shield(defaultWindow());
