/** Monotonic sequence numbers for in-flight requests: a response is only
 * applied if no newer request was issued since (last write wins). */
export class RequestGate {
  private current = 0;

  next(): number {
    this.current += 1;
    return this.current;
  }

  isLatest(token: number): boolean {
    return token === this.current;
  }
}
