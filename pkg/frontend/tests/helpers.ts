import { readFileSync } from "node:fs";

import { Artifact, parseArtifactText } from "../src/artifact.js";

export function fixtureText(name: string): string {
  return readFileSync(new URL(`./fixtures/${name}`, import.meta.url), "utf8");
}

export function fixtureDoc(name: string): any {
  return JSON.parse(fixtureText(name));
}

export function fixtureArtifact(name: string): Artifact {
  return parseArtifactText(fixtureText(name));
}
