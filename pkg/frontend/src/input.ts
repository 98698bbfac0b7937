/** Keyboard/gamepad state to (steering, throttle) in [-1, 1] x [0, 1].
 * Arrows or WASD steer and accelerate; a connected gamepad overrides keys
 * (axis 0 steering, button 7 / axis-trigger throttle). */

export interface ControlState {
  steering: number; // -1 (full left) .. 1 (full right)
  throttle: number; // 0 .. 1
}

const LEFT_KEYS = ["ArrowLeft", "a", "A"];
const RIGHT_KEYS = ["ArrowRight", "d", "D"];
const FORWARD_KEYS = ["ArrowUp", "w", "W"];

export class InputState {
  private down = new Set<string>();

  keyDown(key: string): void {
    this.down.add(key);
  }

  keyUp(key: string): void {
    this.down.delete(key);
  }

  private any(keys: string[]): boolean {
    return keys.some((k) => this.down.has(k));
  }

  control(gamepad?: { axes: number[]; buttons: { value: number }[] }):
      ControlState {
    if (gamepad) {
      const steering = Math.max(-1, Math.min(1, gamepad.axes[0] ?? 0));
      const throttle = Math.max(0, Math.min(1,
        gamepad.buttons[7]?.value ?? 0));
      return { steering, throttle };
    }
    let steering = 0;
    if (this.any(LEFT_KEYS)) steering -= 1;
    if (this.any(RIGHT_KEYS)) steering += 1;
    const throttle = this.any(FORWARD_KEYS) ? 1 : 0;
    return { steering, throttle };
  }
}
