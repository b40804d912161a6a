int main() {
    int i, v, best;
    scanf("%d", &best);
    for (i = 1; i < 3; i++) {
        scanf("%d", &v);
        if (v > best) {
            best = v;
        }
    }
    printf("%d\n", best);
    return 0;
}
