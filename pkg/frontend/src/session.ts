/** Browser-side session state: a stable session id plus the learner's current
 * goal and level. The session id survives reloads via localStorage. */

const STORAGE_KEY = "chemdelt.sessionId";

function randomToken(): string {
  const cryptoApi = globalThis.crypto as Crypto | undefined;
  if (cryptoApi && "randomUUID" in cryptoApi) return cryptoApi.randomUUID();
  return `s-${Date.now().toString(36)}-${Math.random().toString(36).slice(2, 10)}`;
}

export class UiSession {
  readonly sessionId: string;
  goal: string | null = null;
  level = 3;

  constructor(storage: Storage = globalThis.localStorage) {
    const existing = storage.getItem(STORAGE_KEY);
    if (existing) {
      this.sessionId = existing;
    } else {
      this.sessionId = randomToken();
      storage.setItem(STORAGE_KEY, this.sessionId);
    }
  }
}
